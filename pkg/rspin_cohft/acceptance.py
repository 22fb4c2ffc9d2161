"""
The ``verify`` suites. Every suite returns (results, checks); a suite never
raises on a failed property, it records it.
"""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Any

import sympy
from sympy import QQ

from rspin_cohft.algebra_core import A_VAR, R_VAR, Series
from rspin_cohft.data import Check, Shift
from rspin_cohft.errors import PreconditionError
from rspin_cohft.frobenius import (
    FrobeniusPoint,
    euler_grading_matrices,
    fusion_rule_mismatches,
    idempotent_frame,
    tqft_exact,
    tqft_nonvanishing_report,
    tqft_trig,
)
from rspin_cohft.givental import edge_numerator_vanishes
from rspin_cohft.relations_betti import betti_bound, relation_boundary, sin_residue, verify_ma_triangular
from rspin_cohft.rmatrix import (
    b_series,
    p_at_r_zero,
    p_polynomial,
    q_polynomial,
    r_matrix_tau,
    r_matrix_tilde,
    symplectic_residual,
    verify_r_recursion,
)
from rspin_cohft.sl2_genus0 import CorrelatorKey, correlator_sl2, correlator_wdvv
from rspin_cohft.strata import DecoratedClass
from rspin_cohft.witten_diff import (
    TABLE_SIGN,
    WittenClassRequest,
    certify_polynomiality,
    compare_genus2_table,
    eliminate_kappa1,
    genus0_consistency,
    genus2_table_limit,
    named_coefficients,
    r0_limit_class,
    witten_class,
)

log = logging.getLogger(__name__)

SuiteResult = tuple[dict[str, Any], list[Check]]

# closure of the Weierstrass locus and of the conjugate-pair locus, in named classes
HOL_TARGETS: dict[tuple[int, ...], dict[str, Fraction]] = {
    (2,): {"psi1": Fraction(3), "delta_sep": Fraction(-6, 5), "delta_nonsep": Fraction(-1, 10)},
    (1, 1): {
        "psi1": Fraction(1),
        "psi2": Fraction(1),
        "alpha": Fraction(-3),
        "beta": Fraction(-1, 5),
        "gamma": Fraction(-6, 5),
        "delta_nonsep": Fraction(-1, 10),
    },
}


def _admissible_keys(r: int, n: int) -> list[tuple[int, ...]]:
    target = (n - 2) * r - 2
    return [xs for xs in combinations_with_replacement(range(r - 1), n) if sum(xs) == target]


def suite_correlators(max_r: int = 8, max_n: int = 6) -> SuiteResult:
    compared = 0
    mismatches = []
    for r in range(2, max_r + 1):
        for n in range(3, min(max_n, r + 1) + 1):
            for xs in _admissible_keys(r, n):
                key = CorrelatorKey(r, xs)
                compared += 1
                if correlator_sl2(key) != correlator_wdvv(key):
                    mismatches.append((r, xs))
    initial = all(
        correlator_sl2(CorrelatorKey(r, (1, 1, r - 2, r - 2))) == Fraction(1, r) for r in range(3, 11)
    )
    with_one = all(
        correlator_wdvv(CorrelatorKey(r, (*xs, 1))) == Fraction(1, r)
        for r in range(3, max_r + 1)
        for xs in combinations_with_replacement(range(r - 1), 3)
        if sum(xs) == 2 * r - 3
    )
    checks = [
        Check("sl2 and WDVV oracles agree", not mismatches, f"{compared} keys, {len(mismatches)} mismatches"),
        Check("<1,1,r-2,r-2> = 1/r for r = 3..10", initial),
        Check("<a,b,c,1> = 1/r", with_one),
    ]
    return {"keys_compared": compared}, checks


def _factorial_form(r: int, order: int) -> Series:
    """The closed factorial forms of B_{3,0} and B_{4,0}."""
    coeffs = []
    for m in range(order + 1):
        if r == 3:
            coeffs.append(Fraction(factorial(6 * m), factorial(2 * m) * factorial(3 * m)) * Fraction(-1, 1728) ** m)
        else:
            coeffs.append(Fraction(factorial(4 * m), factorial(m) * factorial(2 * m)) * Fraction(-1, 256) ** m)
    return Series(tuple(coeffs))


def suite_bseries(max_r: int = 8, order: int = 20) -> SuiteResult:
    symplectic = all(
        symplectic_residual(r, a, order).is_zero() for r in range(2, max_r + 1) for a in range(r - 1)
    )
    b41 = b_series(4, 1, order).series == Series.constant(1, order)
    forms = all(b_series(r, 0, 10).series == _factorial_form(r, 10) for r in (3, 4))
    return {}, [
        Check(f"symplectic identity to order {order}, r <= {max_r}", symplectic),
        Check("B_{4,1} = 1", b41),
        Check("B_{3,0} and B_{4,0} factorial forms", forms),
    ]


def suite_rmatrix(max_r: int = 8, order: int = 12) -> SuiteResult:
    recursion = []
    inverse = []
    edges = []
    for r in range(2, max_r + 1):
        for shift in Shift:
            build = r_matrix_tau if shift is Shift.Last else r_matrix_tilde
            R, Rinv = build(r, order + 1)
            xi, mu = euler_grading_matrices(FrobeniusPoint(r, shift))
            if not verify_r_recursion(R, xi, mu, order):
                recursion.append((r, shift.value))
            if not (R * Rinv).is_identity():
                inverse.append((r, shift.value))
            if not edge_numerator_vanishes(r, shift, 10):
                edges.append((r, shift.value))
    return {}, [
        Check(f"[R_(m+1), xi] = (m + mu) R_m to order {order}", not recursion, str(recursion) if recursion else ""),
        Check("R R^-1 = 1", not inverse, str(inverse) if inverse else ""),
        Check("edge numerators vanish on psi'' = -psi'", not edges, str(edges) if edges else ""),
    ]


def closed_p1() -> Any:
    r, a = R_VAR, A_VAR
    return QQ(1, 2) * a * (r - 1 - a) - QQ(1, 24) * (2 * r - 1) * (r - 2)


def closed_p2() -> Any:
    r, a = R_VAR, A_VAR
    return (
        QQ(1, 8) * a**4
        - QQ(1, 12) * a**3 * (5 * r - 1)
        + QQ(1, 48) * a**2 * (20 * r**2 - 5 * r - 4)
        - QQ(1, 48) * a * (r - 1) * (6 * r**2 + 7 * r - 2)
        + QQ(1, 1152) * (2 * r - 1) * (r - 2) * (2 * r**2 + 19 * r + 2)
    )


def suite_pm(max_m: int = 6) -> SuiteResult:
    closed = p_polynomial(1).poly == closed_p1() and p_polynomial(2).poly == closed_p2()
    # p_polynomial validates the difference equation and the wrap-around for every m it builds
    built = all(p_polynomial(m).m == m for m in range(max_m + 1))
    limits = all(p_at_r_zero(m) == q_polynomial(m) for m in range(max_m + 1))
    return {}, [
        Check("P_1, P_2 closed forms", closed),
        Check(f"P_m difference equation and P_m(r,0) = P_m(r,r-1) for m <= {max_m}", built),
        Check(f"Q_m(a) = P_m(0, a) for m <= {max_m}", limits),
    ]


def m11_vector(r: int, a: int) -> tuple[Fraction, Fraction, Fraction]:
    """(psi, kappa, delta) of (r-2a-2)(r+2a+2) psi - (r-2)(r+2) kappa + a(a+2)/3 delta."""
    return (
        Fraction((r - 2 * a - 2) * (r + 2 * a + 2)),
        Fraction(-(r - 2) * (r + 2)),
        Fraction(a * (a + 2), 3),
    )


def _proportional(u: tuple[Fraction, ...], v: tuple[Fraction, ...]) -> bool:
    return all(x * w == y * z for x, y in zip(u, v, strict=True) for z, w in zip(u, v, strict=True))


def suite_m11(max_r: int = 9) -> SuiteResult:
    rows = []
    failures = []
    for r in range(3, max_r + 1):
        for a in range(r - 1):
            if (r - a) % 2:
                continue
            named = named_coefficients(relation_boundary(r, 1, [a], 1))
            got = (named.get("psi1", Fraction(0)), named.get("kappa1", Fraction(0)), named.get("delta_nonsep", Fraction(0)))
            if "other" in named or not any(got) or not _proportional(got, m11_vector(r, a)):
                failures.append((r, a))
            rows.append(got)
    rank = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in rows]).rank()
    kernel = all(row[0] + row[1] + 12 * row[2] == 0 for row in rows)
    return {"relations": len(rows)}, [
        Check("M_{1,1} relation matches the closed form", not failures, str(failures) if failures else ""),
        Check("relations span a 2-dimensional space", rank == 2, f"rank {rank}"),
        Check("delta/12 = kappa_1 = psi_1 solves every relation", kernel),
    ]


def suite_genus2(r_values: range = range(5, 13)) -> SuiteResult:
    failures = []
    for a in ((2,), (1, 1)):
        for r in r_values:
            for name, (got, expected) in compare_genus2_table(a, r).items():
                if got != expected:
                    failures.append((a, r, name))
    return {}, [Check("second-shift genus-2 classes match the coefficient tables", not failures, str(failures[:5]))]


def suite_hol(jobs: int = 1) -> SuiteResult:
    checks = []
    results: dict[str, Any] = {}
    genus1 = r0_limit_class(1, (0,), jobs=jobs)
    checks.append(Check("genus 1 limit is the fundamental class", genus1 == DecoratedClass.fundamental(1, 1)))
    for a, target in HOL_TARGETS.items():
        for method in ("certificate", "bernoulli"):
            limit = eliminate_kappa1(r0_limit_class(2, a, method=method, jobs=jobs))  # type: ignore[arg-type]
            named = named_coefficients(limit)
            results[f"{list(a)} {method}"] = named
            checks.append(Check(f"genus 2 a={list(a)} limit via {method}", named == target))
    return results, checks


def suite_tqft(max_r: int = 7, max_euler: int = 6, fusion_r: int = 10) -> SuiteResult:
    worst = 0.0
    for r in range(2, max_r + 1):
        point = FrobeniusPoint(r, Shift.Last)
        for g in range(max_euler // 2 + 2):
            for n in range(max_euler - 2 * g + 3):
                if not 0 < 2 * g - 2 + n <= max_euler:
                    continue
                for xs in combinations_with_replacement(range(r - 1), n):
                    exact = float(tqft_exact(point, g, xs).value)
                    worst = max(worst, abs(exact - tqft_trig(r, g, xs)))
    fusion = [r for r in range(2, fusion_r + 1) if fusion_rule_mismatches(r)]
    vanishing = [r for r in range(2, max_r + 1) if tqft_nonvanishing_report(r, max_euler)]
    frames = [r for r in range(2, fusion_r + 1) if not idempotent_frame(r).passed]
    return {"max_trig_error": worst}, [
        Check("trigonometric and exact TQFT agree", worst < 1e-9, f"max error {worst:.2e}"),
        Check("fusion rules are the level-r sl2 rules", not fusion, str(fusion) if fusion else ""),
        Check("parity-allowed values are positive in genus >= 1", not vanishing, str(vanishing) if vanishing else ""),
        Check("sine frame is an idempotent frame", not frames, str(frames) if frames else ""),
    ]


def suite_betti(max_g: int = 12, max_d: int = 6) -> SuiteResult:
    top = all(betti_bound(g, g - 2) == 1 for g in range(2, max_g + 1))
    above = all(betti_bound(g, d) == 0 for g in range(2, max_g + 1) for d in range(g - 1, 3 * g))
    reports = [verify_ma_triangular(d) for d in range(1, max_d + 1)]
    residues = sin_residue(4) != 0 and all(sin_residue(e) == 0 for e in range(6, 16, 2))
    return {}, [
        Check("bound(g, g-2) = 1", top),
        Check("bound(g, d) = 0 for d >= g-1", above),
        Check(f"MA triangular with nonzero diagonal for d <= {max_d}", all(r.passed for r in reports)),
        Check("sin residues", residues),
    ]


def suite_poly(jobs: int = 1) -> SuiteResult:
    checks = []
    results: dict[str, Any] = {}
    for a in ((2,), (1, 1)):
        cert = certify_polynomiality(2, a, jobs=jobs)
        results[str(list(a))] = {"window": list(cert.sample_range), "threshold": cert.threshold}
        checks.append(Check(f"a={list(a)} coefficients divisible by r-1", cert.divisible))
        limit = cert.constant_class().scale(TABLE_SIGN(2))
        constant = named_coefficients(limit)
        checks.append(Check(f"a={list(a)} constant terms match the tables", constant == genus2_table_limit(a)))
        bern = r0_limit_class(2, a, method="bernoulli", jobs=jobs)
        checks.append(
            Check(f"a={list(a)} certificate and Bernoulli limits agree", bern == limit)
        )
    return results, checks


def suite_consistency(max_r: int = 6, max_n: int = 6) -> SuiteResult:
    degree0 = []
    genus0 = []
    compared: dict[int, int] = {}
    for r in range(3, max_r + 1):
        for g, n in ((0, 3), (1, 1), (1, 2), (0, 4), (2, 1)):
            for a in combinations_with_replacement(range(r - 1), n):
                if ((r - 2) * (g - 1) + sum(a)) != 0:
                    continue
                last = witten_class(WittenClassRequest(r, g, a, Shift.Last))
                second = witten_class(WittenClassRequest(r, g, a, Shift.Second))
                if last != second:
                    degree0.append((r, g, a))
        # no admissible keys past n = r + 1
        for n in range(3, min(max_n, r + 1) + 1):
            for a in _admissible_keys(r, n):
                compared[n] = compared.get(n, 0) + 1
                integral, correlator = genus0_consistency(r, a)
                if integral != correlator:
                    genus0.append((r, a))
    return {"genus0_compared": compared}, [
        Check("degree-0 Witten classes agree across shifts", not degree0, str(degree0[:5])),
        Check("genus-0 Witten classes integrate to the correlators", not genus0, str(genus0[:5])),
    ]


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "correlators": suite_correlators,
    "bseries": suite_bseries,
    "rmatrix": suite_rmatrix,
    "pm": suite_pm,
    "m11": suite_m11,
    "genus2": suite_genus2,
    "hol": suite_hol,
    "tqft": suite_tqft,
    "betti": suite_betti,
    "poly": suite_poly,
    "consistency": suite_consistency,
}


def run_suites(names: list[str], jobs: int = 1) -> SuiteResult:
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        msg = f"unknown suites {unknown}, choose from {sorted(SUITES)}"
        raise PreconditionError(msg)

    def run(name: str) -> SuiteResult:
        log.info(f"running suite {name}", extra={"command_prefix": name})
        func = SUITES[name]
        if name in ("hol", "poly"):
            return func(jobs=jobs)
        return func()

    results: dict[str, Any] = {}
    checks: list[Check] = []
    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as pool:
        for name, (res, chk) in zip(names, pool.map(run, names), strict=True):
            results[name] = res
            checks.extend(Check(f"{name}: {c.name}", c.passed, c.detail) for c in chk)
    return results, checks
