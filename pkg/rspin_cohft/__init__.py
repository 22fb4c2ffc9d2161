import logging
import sys
from collections.abc import Sequence

__version__ = "0.1.0"

from rspin_cohft import cli
from rspin_cohft.errors import RspinError

log = logging.getLogger(__name__)


def main(argv: Sequence[str] | None = None) -> None:
    try:
        cli.run_cli(argv)
    except RspinError as e:
        if log.isEnabledFor(logging.DEBUG):
            raise
        log.error(e)
        sys.exit(e.exit_code)
