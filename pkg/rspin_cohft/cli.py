#!/usr/bin/env python3

import argparse
import logging
import os
import sys
import time
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any

import rspin_cohft
from rspin_cohft.acceptance import HOL_TARGETS, SUITES, run_suites
from rspin_cohft.algebra_core import as_fraction
from rspin_cohft.custom_logger import setup_logging
from rspin_cohft.data import Check, Method, Oracle, OutputFormat, Report, RunConfig, Shift
from rspin_cohft.errors import DegreeMismatchError, PreconditionError, VerificationFailed
from rspin_cohft.frobenius import (
    FrobeniusPoint,
    euler_grading_matrices,
    fusion_rule_mismatches,
    quantum_product,
    tqft_exact,
    tqft_trig,
)
from rspin_cohft.relations_betti import (
    betti_bound,
    betti_table,
    relation_boundary,
    relation_interior,
    verify_ma_triangular,
)
from rspin_cohft.report import emit_report, write_report
from rspin_cohft.rmatrix import p_polynomial, r_matrix_tau, r_matrix_tilde, verify_r_recursion
from rspin_cohft.sl2_genus0 import CorrelatorKey, correlator_sl2, correlator_wdvv
from rspin_cohft.strata import DecoratedClass
from rspin_cohft.witten_diff import (
    TABLE_SIGN,
    WittenClassRequest,
    certify_polynomiality,
    eliminate_kappa1,
    genus2_table_limit,
    named_coefficients,
    r0_limit_class,
    witten_class,
    witten_degree,
)

log = logging.getLogger(__name__)

DEFAULT_RMATRIX_ORDER = 20
ORDER_ENV = "RSPIN_TRUNCATION_ORDER"


def parse_int_list(text: str) -> list[int]:
    """Parses '3,3,1' into [3, 3, 1]. The empty string is the empty list."""
    if not text.strip():
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        msg = f"Invalid integer list: '{text}'. Expected comma-separated integers."
        raise argparse.ArgumentTypeError(msg) from None


def parse_positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        msg = f"Invalid integer: '{text}'"
        raise argparse.ArgumentTypeError(msg) from None
    if value < 1:
        msg = f"Expected a positive integer, got {value}"
        raise argparse.ArgumentTypeError(msg)
    return value


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--debug", action="store_true", default=argparse.SUPPRESS, help="Enable debug mode"
    )
    common.add_argument("--jobs", type=parse_positive, help="Worker threads (default: all cores)")
    common.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        default=OutputFormat.Json.value,
        help="Report serialization",
    )
    common.add_argument("--output", type=Path, help="Write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="Include elapsed time in the report")
    return common


def _add_shift(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--shift",
        choices=[s.value for s in Shift],
        default=Shift.Last.value,
        help="Shift point of the Frobenius manifold",
    )


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rspin")
    parser.add_argument("--debug", action="store_true", help="Enable debug mode")
    subparsers = parser.add_subparsers(dest="subcommand")
    common = _common_flags()

    correlator_parser = subparsers.add_parser(
        "correlator", help="Genus-0 r-spin correlator", parents=[common]
    )
    correlator_parser.add_argument("--r", type=int, required=True)
    correlator_parser.add_argument("--a", type=parse_int_list, required=True, help="Insertions a1,a2,...")
    correlator_parser.add_argument(
        "--oracle", choices=[o.value for o in Oracle], default=Oracle.Both.value
    )

    fusion_parser = subparsers.add_parser("fusion", help="Quantum product e_a * e_b", parents=[common])
    fusion_parser.add_argument("--r", type=int, required=True)
    fusion_parser.add_argument("--a", type=int, required=True)
    fusion_parser.add_argument("--b", type=int, required=True)
    _add_shift(fusion_parser)

    topft_parser = subparsers.add_parser("topft", help="Topological field theory value", parents=[common])
    topft_parser.add_argument("--r", type=int, required=True)
    topft_parser.add_argument("--g", type=int, required=True)
    topft_parser.add_argument("--a", type=parse_int_list, default=[])
    _add_shift(topft_parser)
    topft_parser.add_argument("--method", choices=[m.value for m in Method], default=Method.Exact.value)

    rmatrix_parser = subparsers.add_parser("rmatrix", help="R-matrix and its inverse", parents=[common])
    rmatrix_parser.add_argument("--r", type=int, required=True)
    _add_shift(rmatrix_parser)
    rmatrix_parser.add_argument("--order", type=parse_positive)

    pm_parser = subparsers.add_parser("pm", help="The polynomial P_m(r, a)", parents=[common])
    pm_parser.add_argument("--m", type=int, required=True)

    witten_parser = subparsers.add_parser("witten", help="Witten's r-spin class", parents=[common])
    witten_parser.add_argument("--r", type=int, required=True)
    witten_parser.add_argument("--g", type=int, required=True)
    witten_parser.add_argument("--a", type=parse_int_list, required=True)
    _add_shift(witten_parser)

    relation_parser = subparsers.add_parser("relation", help="Tautological relation", parents=[common])
    relation_parser.add_argument("--r", type=int, required=True)
    relation_parser.add_argument("--g", type=int, required=True)
    relation_parser.add_argument("--a", type=parse_int_list, default=[])
    relation_parser.add_argument("--d", type=int, required=True)
    relation_parser.add_argument("--interior", action="store_true", help="Interior relation on M_{g,n}")
    relation_parser.add_argument("--sigma", type=parse_int_list, default=[])

    betti_parser = subparsers.add_parser("betti", help="Betti bound table", parents=[common])
    betti_parser.add_argument("--g", type=int, required=True)
    betti_parser.add_argument("--d", type=int)

    ma_parser = subparsers.add_parser("verify-ma", help="Triangularity of MA", parents=[common])
    ma_parser.add_argument("--d", type=int, required=True)

    cert_parser = subparsers.add_parser(
        "poly-cert", help="Polynomiality of r^(g-1) W in r", parents=[common]
    )
    cert_parser.add_argument("--g", type=int, required=True)
    cert_parser.add_argument("--a", type=parse_int_list, required=True)
    cert_parser.add_argument("--rmin", type=int)
    cert_parser.add_argument("--rmax", type=int)

    hol_parser = subparsers.add_parser("hol-limit", help="The r -> 0 limit class", parents=[common])
    hol_parser.add_argument("--g", type=int, required=True)
    hol_parser.add_argument("--a", type=parse_int_list, required=True)
    hol_parser.add_argument("--eliminate-kappa1", action="store_true")
    hol_parser.add_argument(
        "--path", choices=["certificate", "bernoulli", "both"], default="certificate"
    )

    verify_parser = subparsers.add_parser("verify", help="Run acceptance suites", parents=[common])
    verify_parser.add_argument(
        "--suite", default="all", help=f"'all' or a comma list of: {', '.join(SUITES)}"
    )

    return parser


def _truncation_order(args: argparse.Namespace) -> int | None:
    if getattr(args, "order", None) is not None:
        return args.order
    if raw := os.environ.get(ORDER_ENV):
        try:
            value = int(raw)
        except ValueError:
            value = 0
        if value < 1:
            msg = f"{ORDER_ENV} must be a positive integer, got '{raw}'"
            raise PreconditionError(msg)
        return value
    return None


def create_conf_obj(args: argparse.Namespace) -> RunConfig:
    is_debug = getattr(args, "debug", False)
    window = None
    rmin, rmax = getattr(args, "rmin", None), getattr(args, "rmax", None)
    if (rmin is None) != (rmax is None):
        msg = "--rmin and --rmax must be given together"
        raise PreconditionError(msg)
    if rmin is not None and rmax is not None:
        if rmax < rmin:
            msg = f"empty r window {rmin}..{rmax}"
            raise PreconditionError(msg)
        window = (rmin, rmax)

    return RunConfig(
        command=args.subcommand,
        debug=is_debug,
        r=getattr(args, "r", None),
        g=getattr(args, "g", None),
        a=getattr(args, "a", []) if isinstance(getattr(args, "a", None), list) else [],
        sigma=getattr(args, "sigma", []),
        d=getattr(args, "d", None),
        m=getattr(args, "m", None),
        shift=Shift.from_str(getattr(args, "shift", Shift.Last.value)),
        oracle=Oracle.from_str(getattr(args, "oracle", Oracle.Both.value)),
        method=Method(getattr(args, "method", Method.Exact.value)),
        order=_truncation_order(args),
        r_window=window,
        interior=getattr(args, "interior", False),
        eliminate_kappa1=getattr(args, "eliminate_kappa1", False),
        limit_path=getattr(args, "path", "certificate"),
        suite=getattr(args, "suite", "all"),
        jobs=getattr(args, "jobs", None) or os.cpu_count() or 1,
        fmt=OutputFormat(getattr(args, "format", OutputFormat.Json.value)),
        output=getattr(args, "output", None),
        timing=getattr(args, "timing", False),
    )


def _echo_args(config: RunConfig, args: argparse.Namespace) -> dict[str, Any]:
    skip = {"subcommand", "debug", "jobs", "format", "output", "timing"}
    echo = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    if config.command == "rmatrix":
        echo["order"] = config.order or DEFAULT_RMATRIX_ORDER
    return echo


def _require(value: int | None, flag: str) -> int:
    if value is None:
        msg = f"{flag} is required"
        raise PreconditionError(msg)
    return value


def cmd_correlator(config: RunConfig) -> tuple[dict[str, Any], list[Check]]:
    r = _require(config.r, "--r")
    try:
        key = CorrelatorKey(r, tuple(config.a))
    except DegreeMismatchError as e:
        log.info(f"correlator vanishes: {e}")
        values = {o.value: Fraction(0) for o in (Oracle.Sl2, Oracle.Wdvv) if config.oracle in (o, Oracle.Both)}
        return {**values, "vanishes": "degree"}, [Check("oracles agree", True, "zero by degree")]
    results: dict[str, Any] = {}
    if config.oracle in (Oracle.Sl2, Oracle.Both):
        results["sl2"] = correlator_sl2(key)
    if config.oracle in (Oracle.Wdvv, Oracle.Both):
        results["wdvv"] = correlator_wdvv(key)
    checks = []
    if config.oracle is Oracle.Both:
        checks.append(Check("oracles agree", results["sl2"] == results["wdvv"]))
    results["value"] = next(iter(results.values()))
    return results, checks


def cmd_fusion(config: RunConfig, a: int, b: int) -> tuple[dict[str, Any], list[Check]]:
    point = FrobeniusPoint(_require(config.r, "--r"), config.shift)
    product = quantum_product(point, a, b)
    results = {"product": {f"e{c}": v for c, v in enumerate(product) if v}}
    checks = []
    if config.shift is Shift.Last:
        mismatches = fusion_rule_mismatches(point.r)
        checks.append(Check("level-r sl2 fusion rules", not mismatches, str(mismatches) if mismatches else ""))
    return results, checks


def cmd_topft(config: RunConfig) -> tuple[dict[str, Any], list[Check]]:
    r, g = _require(config.r, "--r"), _require(config.g, "--g")
    if config.method is Method.Trig:
        if config.shift is not Shift.Last:
            msg = "the trigonometric evaluator is available at the last shift only"
            raise PreconditionError(msg)
        value = tqft_trig(r, g, config.a)
        exact = tqft_exact(FrobeniusPoint(r, Shift.Last), g, config.a).value
        agree = abs(value - float(exact)) < 1e-9
        return {"value": value, "exact": exact}, [Check("trigonometric and exact agree", agree)]
    return {"value": tqft_exact(FrobeniusPoint(r, config.shift), g, config.a).value}, []


def cmd_rmatrix(config: RunConfig) -> tuple[dict[str, Any], list[Check]]:
    r = _require(config.r, "--r")
    order = config.order or DEFAULT_RMATRIX_ORDER
    build = r_matrix_tau if config.shift is Shift.Last else r_matrix_tilde
    R, Rinv = build(r, order)
    xi, mu = euler_grading_matrices(FrobeniusPoint(r, config.shift))
    checks = [
        Check("R R^-1 = 1", (R * Rinv).is_identity()),
        Check("[R_(m+1), xi] = (m + mu) R_m", verify_r_recursion(R, xi, mu, order - 1)),
    ]
    return {"order": order, "R": R, "R_inverse": Rinv}, checks


def cmd_pm(config: RunConfig) -> tuple[dict[str, Any], list[Check]]:
    poly = p_polynomial(_require(config.m, "--m")).poly
    terms = [
        {"r": i, "a": j, "coeff": as_fraction(c)}
        for (i, j), c in sorted(poly.terms())  # type: ignore[attr-defined]
    ]
    return {"m": config.m, "terms": terms}, []


def cmd_witten(config: RunConfig) -> tuple[dict[str, Any], list[Check]]:
    r, g = _require(config.r, "--r"), _require(config.g, "--g")
    req = WittenClassRequest(r, g, tuple(config.a), config.shift)
    return {"degree": witten_degree(r, g, config.a), "class": witten_class(req)}, []


def cmd_relation(config: RunConfig) -> tuple[dict[str, Any], list[Check]]:
    r, g, d = _require(config.r, "--r"), _require(config.g, "--g"), _require(config.d, "--d")
    if config.interior:
        rel = relation_interior(r, g, len(config.a), config.a, config.sigma, d)
        return {"relation": rel}, []
    return {"relation": relation_boundary(r, g, config.a, d)}, []


def cmd_betti(config: RunConfig) -> tuple[dict[str, Any], list[Check]]:
    g = _require(config.g, "--g")
    if config.d is not None:
        return {"bounds": {str(config.d): betti_bound(g, config.d)}}, []
    return {"bounds": {str(d): b for d, b in betti_table(g).items()}}, []


def cmd_verify_ma(config: RunConfig) -> tuple[dict[str, Any], list[Check]]:
    report = verify_ma_triangular(_require(config.d, "--d"))
    checks = [
        Check("MA upper triangular", report.triangular),
        Check("MA diagonal nonzero", report.diagonal_nonzero),
        *(Check(name, ok) for name, ok in sorted(report.vanishing.items())),
    ]
    return {"partitions": report.partitions, "product": report.product, "residues": report.residues}, checks


def cmd_poly_cert(config: RunConfig) -> tuple[dict[str, Any], list[Check]]:
    g = _require(config.g, "--g")
    a = tuple(config.a)
    cert = certify_polynomiality(g, a, config.r_window, config.jobs)
    checks = [Check("coefficients divisible by r-1", cert.divisible)]
    if g == 2 and a in HOL_TARGETS:
        limit = named_coefficients(cert.constant_class().scale(TABLE_SIGN(g)))
        checks.append(Check("constant terms match the genus-2 tables", limit == genus2_table_limit(a)))
    return {"certificate": cert, "degree_in_r": cert.degree_in_r()}, checks


def _hol_checks(g: int, a: tuple[int, ...], cls: DecoratedClass, label: str) -> list[Check]:
    if g == 1:
        return [Check(f"{label}: genus-1 limit is the fundamental class", cls == DecoratedClass.fundamental(1, 1))]
    if g == 2 and a in HOL_TARGETS:
        named = named_coefficients(eliminate_kappa1(cls))
        return [Check(f"{label}: matches the holomorphic locus class", named == HOL_TARGETS[a])]
    return []


def cmd_hol_limit(config: RunConfig) -> tuple[dict[str, Any], list[Check]]:
    g = _require(config.g, "--g")
    a = tuple(config.a)
    paths = ["certificate", "bernoulli"] if config.limit_path == "both" else [config.limit_path]
    results: dict[str, Any] = {}
    checks: list[Check] = []
    classes = {}
    for path in paths:
        cls = r0_limit_class(g, a, method=path, jobs=config.jobs)  # type: ignore[arg-type]
        classes[path] = cls
        checks.extend(_hol_checks(g, a, cls, path))
        results[path] = eliminate_kappa1(cls) if config.eliminate_kappa1 else cls
    if len(classes) == 2:
        checks.append(Check("certificate and Bernoulli limits agree", classes["certificate"] == classes["bernoulli"]))
    return results, checks


def cmd_verify(config: RunConfig) -> tuple[dict[str, Any], list[Check]]:
    names = list(SUITES) if config.suite == "all" else [s.strip() for s in config.suite.split(",")]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        msg = f"unknown suites {unknown}, choose from {', '.join(SUITES)}"
        raise PreconditionError(msg)
    return run_suites(names, config.jobs)


def dispatch(config: RunConfig, args: argparse.Namespace) -> Report:
    start = time.perf_counter()
    command = config.command
    if command == "correlator":
        results, checks = cmd_correlator(config)
    elif command == "fusion":
        results, checks = cmd_fusion(config, args.a, args.b)
    elif command == "topft":
        results, checks = cmd_topft(config)
    elif command == "rmatrix":
        results, checks = cmd_rmatrix(config)
    elif command == "pm":
        results, checks = cmd_pm(config)
    elif command == "witten":
        results, checks = cmd_witten(config)
    elif command == "relation":
        results, checks = cmd_relation(config)
    elif command == "betti":
        results, checks = cmd_betti(config)
    elif command == "verify-ma":
        results, checks = cmd_verify_ma(config)
    elif command == "poly-cert":
        results, checks = cmd_poly_cert(config)
    elif command == "hol-limit":
        results, checks = cmd_hol_limit(config)
    elif command == "verify":
        results, checks = cmd_verify(config)
    else:
        msg = f"unknown command {command}"
        raise PreconditionError(msg)
    elapsed = time.perf_counter() - start
    log.info(f"{command} finished in {elapsed:.3f}s", extra={"command_prefix": command})
    return Report(
        command=command,
        args=_echo_args(config, args),
        results=results,
        checks=checks,
        version=rspin_cohft.__version__,
        elapsed=elapsed,
    )


def run_cli(argv: Sequence[str] | None = None) -> None:
    parser = create_parser()
    args = parser.parse_args(argv)

    if args.subcommand is None:
        parser.print_help()
        return

    is_debug = getattr(args, "debug", False)
    if is_debug:
        setup_logging(logging.DEBUG)
        setup_logging(logging.DEBUG, root_log_name=__name__.split(".")[0])
    else:
        setup_logging(logging.INFO)
        setup_logging(logging.INFO, root_log_name=__name__.split(".")[0])

    log.debug("Debug mode enabled")

    config = create_conf_obj(args)
    report = dispatch(config, args)
    color = config.output is None and sys.stdout.isatty() and not os.environ.get("NO_COLOR")
    write_report(emit_report(report, config.fmt, config.timing, color), config.output)

    failed = [c.name for c in report.checks if not c.passed]
    if failed:
        msg = f"{len(failed)} check(s) failed: {', '.join(failed)}"
        raise VerificationFailed(msg)
