"""
Report serialization. JSON output is canonical: sorted keys, rationals as
"p/q" strings, and no timing unless it was asked for.
"""

import dataclasses
import json
import logging
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any

from rspin_cohft.colors import status
from rspin_cohft.data import Check, OutputFormat, Report
from rspin_cohft.strata import DecoratedClass, DecoratedGraph
from rspin_cohft.witten_diff import format_named, named_coefficients

log = logging.getLogger(__name__)

SCHEMA = "rspin-report/1"


def to_jsonable(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, int | str):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "to_json"):
        return to_jsonable(value.to_json())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple | set | frozenset):
        return [to_jsonable(v) for v in value]
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if hasattr(value, "as_expr"):
        return str(value.as_expr())
    return str(value)


def report_to_dict(report: Report, timing: bool = False) -> dict[str, Any]:
    out: dict[str, Any] = {
        "schema": SCHEMA,
        "command": report.command,
        "args": to_jsonable(report.args),
        "results": to_jsonable(report.results),
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in report.checks],
        "passed": report.passed,
        "version": report.version,
    }
    if timing and report.elapsed is not None:
        out["elapsed"] = round(report.elapsed, 3)
    return out


def _describe_graph(graph: DecoratedGraph) -> str:
    if graph.is_principal():
        parts = [f"psi{i + 1}^{p}" if p > 1 else f"psi{i + 1}" for i, (_, p) in enumerate(graph.legs) if p]
        parts += [f"kappa{m}" for m in graph.kappa[0]]
        return "*".join(parts) if parts else "1"
    return json.dumps(graph.to_json(), sort_keys=True, separators=(",", ":"))


def format_class(cls: DecoratedClass) -> str:
    """Human form: named degree-one classes when they span the class, terms otherwise."""
    if cls.is_zero():
        return "0"
    named = named_coefficients(cls)
    if "other" not in named:
        return format_named(named)
    return "\n".join(f"{c} * {_describe_graph(graph)}" for graph, c in cls.terms)


def _format_value(value: Any, indent: str = "  ") -> list[str]:
    if isinstance(value, DecoratedClass):
        space = f"M_{{{value.g},{value.n}}}bar"
        return [f"{indent}{line}" for line in format_class(value).splitlines()] + [f"{indent}on {space}"]
    if isinstance(value, dict):
        lines = []
        for k, v in value.items():
            sub = _format_value(v, indent + "  ")
            if len(sub) == 1:
                lines.append(f"{indent}{k}: {sub[0].strip()}")
            else:
                lines.append(f"{indent}{k}:")
                lines.extend(sub)
        return lines
    return [f"{indent}{json.dumps(to_jsonable(value), sort_keys=True)}"]


def emit_report(
    report: Report,
    fmt: OutputFormat = OutputFormat.Json,
    timing: bool = False,
    color: bool = False,
) -> str:
    if fmt is OutputFormat.Json:
        return json.dumps(report_to_dict(report, timing), sort_keys=True, indent=2) + "\n"
    lines = [f"{report.command} (rspin {report.version})"]
    lines.extend(_format_value(report.results))
    for check in report.checks:
        detail = f": {check.detail}" if check.detail else ""
        lines.append(f"[{status(check.passed, color)}] {check.name}{detail}")
    if timing and report.elapsed is not None:
        lines.append(f"elapsed {report.elapsed:.3f}s")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> Report:
    data = json.loads(text)
    if data.get("schema") != SCHEMA:
        msg = f"unknown report schema {data.get('schema')!r}"
        raise ValueError(msg)
    checks = [Check(c["name"], c["passed"], c.get("detail", "")) for c in data["checks"]]
    return Report(
        command=data["command"],
        args=data["args"],
        results=data["results"],
        checks=checks,
        version=data["version"],
        elapsed=data.get("elapsed"),
    )


def write_report(text: str, output: Path | None) -> None:
    if output is None:
        print(text, end="")
        return
    output.write_text(text)
    log.info(f"report written to {output}")
