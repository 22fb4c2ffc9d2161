from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any


class Shift(Enum):
    Last = "last"
    Second = "second"

    @staticmethod
    def from_str(label: str) -> "Shift":
        if label in Shift._value2member_map_:
            return Shift(Shift._value2member_map_[label])
        msg = f"Unknown shift: {label}"
        raise ValueError(msg)


class Oracle(Enum):
    Sl2 = "sl2"
    Wdvv = "wdvv"
    Both = "both"

    @staticmethod
    def from_str(label: str) -> "Oracle":
        if label in Oracle._value2member_map_:
            return Oracle(Oracle._value2member_map_[label])
        msg = f"Unknown oracle: {label}"
        raise ValueError(msg)


class Method(Enum):
    Exact = "exact"
    Trig = "trig"


class OutputFormat(Enum):
    Json = "json"
    Text = "text"


@dataclass
class RunConfig:
    command: str
    debug: bool = False
    r: int | None = None
    g: int | None = None
    n: int | None = None
    a: list[int] = field(default_factory=list)
    sigma: list[int] = field(default_factory=list)
    d: int | None = None
    m: int | None = None
    shift: Shift = Shift.Last
    oracle: Oracle = Oracle.Both
    method: Method = Method.Exact
    order: int | None = None
    r_window: tuple[int, int] | None = None
    interior: bool = False
    eliminate_kappa1: bool = False
    limit_path: str = "certificate"
    suite: str = "all"
    jobs: int = 1
    fmt: OutputFormat = OutputFormat.Json
    output: Path | None = None
    timing: bool = False


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    command: str
    args: dict[str, Any]
    results: dict[str, Any]
    checks: list[Check] = field(default_factory=list)
    version: str = ""
    elapsed: float | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)
