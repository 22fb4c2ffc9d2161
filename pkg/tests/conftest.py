import json
from collections.abc import Callable
from typing import Any

import pytest

from rspin_cohft import cli


@pytest.fixture
def run_json(capsys: pytest.CaptureFixture[str]) -> Callable[..., dict[str, Any]]:
    """Run the CLI with the given arguments and parse the JSON report from stdout."""

    def run(*argv: str) -> dict[str, Any]:
        cli.run_cli(list(argv))
        return json.loads(capsys.readouterr().out)

    return run
