import json
from fractions import Fraction

import pytest

from rspin_cohft.colors import status
from rspin_cohft.data import Check, OutputFormat, Report
from rspin_cohft.report import SCHEMA, emit_report, format_class, parse_report, report_to_dict, to_jsonable
from rspin_cohft.strata import DecoratedClass, boundary_divisor, kappa_class, psi_class


def _report() -> Report:
    cls = psi_class(1, 1, 1) + boundary_divisor(1, 1, "nonsep").scale(Fraction(-1, 12))
    return Report(
        command="witten",
        args={"r": 5, "a": [1, 1, 1]},
        results={"value": Fraction(1, 3), "class": cls, "window": (5, 9)},
        checks=[Check("agree", True), Check("divisible", False, "at r = 7")],
        version="0.1.0",
        elapsed=1.23456,
    )


def test_rationals_are_strings():
    assert to_jsonable(Fraction(1, 3)) == "1/3"
    assert to_jsonable(Fraction(4, 2)) == "2"
    assert to_jsonable({1: (Fraction(-1, 2), None)}) == {"1": ["-1/2", None]}


def test_json_is_canonical():
    text = emit_report(_report())
    data = json.loads(text)
    assert data["schema"] == SCHEMA
    assert data["results"]["value"] == "1/3"
    assert data["passed"] is False
    assert "elapsed" not in data
    assert text == json.dumps(data, sort_keys=True, indent=2) + "\n"


def test_timing_is_opt_in():
    assert report_to_dict(_report(), timing=True)["elapsed"] == 1.235


def test_round_trip():
    report = _report()
    parsed = parse_report(emit_report(report))
    assert parsed.command == report.command
    assert parsed.checks == report.checks
    assert not parsed.passed
    assert DecoratedClass.from_json(parsed.results["class"]) == report.results["class"]


def test_unknown_schema():
    with pytest.raises(ValueError, match="unknown report schema"):
        parse_report(json.dumps({"schema": "other"}))


def test_text_format():
    text = emit_report(_report(), OutputFormat.Text)
    assert text.startswith("witten (rspin 0.1.0)\n")
    assert "1*psi1 + -1/12*delta_nonsep" in text
    assert "on M_{1,1}bar" in text
    assert "[PASS] agree" in text
    assert "[FAIL] divisible: at r = 7" in text


def test_format_class():
    assert format_class(DecoratedClass.zero(1, 1)) == "0"
    assert format_class(psi_class(1, 1, 1).scale(2)) == "2*psi1"
    assert format_class(kappa_class(1, 2, (2,))) == "1 * kappa2"
    assert format_class(psi_class(0, 5, 1, 2)) == "1 * psi1^2"


def test_colored_status():
    plain = emit_report(_report(), OutputFormat.Text)
    colored = emit_report(_report(), OutputFormat.Text, color=True)
    assert "\x1b[" not in plain
    assert "\x1b[" in colored
    assert status(True, enabled=False) == "PASS"
    assert status(False).endswith("FAIL\x1b[0m")
