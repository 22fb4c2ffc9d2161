"""
Witten's r-spin class, its polynomiality in r and the r -> 0 limit.

The rescaled class r^{g-1} W^r_{g,n}(a) with sum(a) = 2g - 2 is computed at the
second shift for a window of integer r, interpolated coefficientwise and
certified on held-out values. Its constant term, signed by (-1)^g, is the
candidate class of the closure of the locus of holomorphic differentials with
zeros a. The same limit is also computed straight from the Bernoulli form of
the graph sum.
"""

import logging
from collections import defaultdict
from collections.abc import Callable, Hashable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Any, Literal, TypeVar

import sympy
from sympy import QQ, ring
from sympy.polys.polyfuncs import interpolate

from rspin_cohft.algebra_core import as_fraction, rational_str
from rspin_cohft.data import Shift
from rspin_cohft.errors import (
    EdgeDivisibilityError,
    PolynomialityError,
    PreconditionError,
)
from rspin_cohft.givental import givental_action
from rspin_cohft.rmatrix import bernoulli_polynomial, p_value, q_value
from rspin_cohft.sl2_genus0 import CorrelatorKey, correlator_sl2
from rspin_cohft.strata import (
    DecoratedClass,
    DecoratedGraph,
    StableGraph,
    automorphism_order,
    boundary_divisor,
    enumerate_stable_graphs,
    enumerate_weightings,
    kappa_class,
    kappa_polynomial,
    pushforward_kappa,
    psi_class,
)

log = logging.getLogger(__name__)

R_RING, R_ONLY = ring("r", QQ)

VANISHES = "vanishes"


# conventions of the genus-2 coefficient tables
def TABLE_SIGN(g: int) -> int:
    return (-1) ** g


def TABLE_RESCALE(g: int) -> Any:
    return R_ONLY ** (g - 1)


MAX_WINDOW = 14
MAX_START_SHIFT = 4

K = TypeVar("K", bound=Hashable)


def witten_degree(r: int, g: int, a: list[int] | tuple[int, ...]) -> int | Literal["vanishes"]:
    bad = [x for x in a if not 0 <= x <= r - 2]
    if bad:
        msg = f"insertions {bad} out of range 0..{r - 2}"
        raise PreconditionError(msg)
    D = Fraction((r - 2) * (g - 1) + sum(a), r)
    if D.denominator != 1 or D < 0:
        return VANISHES
    return int(D)


@dataclass(frozen=True)
class WittenClassRequest:
    r: int
    g: int
    a: tuple[int, ...]
    shift: Shift = Shift.Last

    def __post_init__(self) -> None:
        if self.r < 2:
            msg = f"r must be at least 2, got {self.r}"
            raise PreconditionError(msg)
        if self.g < 0 or 2 * self.g - 2 + self.n <= 0:
            msg = f"unstable (g, n) = ({self.g}, {self.n})"
            raise PreconditionError(msg)

    @property
    def n(self) -> int:
        return len(self.a)


def witten_class(req: WittenClassRequest, degree_cap: int | None = None) -> DecoratedClass:
    D = witten_degree(req.r, req.g, req.a)
    if D == VANISHES or D > 3 * req.g - 3 + req.n:
        log.info(f"W r={req.r} g={req.g} a={list(req.a)} vanishes (degree {D})")
        return DecoratedClass.zero(req.g, req.n)
    assert isinstance(D, int)
    if degree_cap is not None and degree_cap < D:
        msg = f"degree cap {degree_cap} below the Witten degree {D}"
        raise PreconditionError(msg)
    # a larger cap runs the graph sum to that degree and keeps only the degree-D part
    cap = D if degree_cap is None else min(degree_cap, 3 * req.g - 3 + req.n)
    return givental_action(req.r, req.shift, req.g, req.a, cap).degree_part(D)


def _vertex_integral(exps: tuple[int, ...], kappa: tuple[int, ...]) -> Fraction:
    """Integral over M_{0,m}bar of prod psi_i^{e_i} times a kappa monomial, m = len(exps)."""
    m = len(exps)
    if sum(exps) + sum(kappa) != m - 3:
        return Fraction(0)
    if not kappa:
        out = Fraction(factorial(m - 3))
        for e in exps:
            out /= factorial(e)
        return out
    # kappa_b1...kappa_bk = p_*(prod psi^{b_j+1}) minus the coarser cycle terms
    lifted = _vertex_integral((*exps, *(b + 1 for b in kappa)), ())
    for mono, c in pushforward_kappa(tuple(sorted(kappa)), 0, m):
        if mono != tuple(sorted(kappa)):
            lifted -= c * _vertex_integral(exps, mono)
    return lifted


def genus0_integral(cls: DecoratedClass) -> Fraction:
    """Integral of a genus-0 decorated class over M_{0,n}bar."""
    if cls.g != 0:
        msg = f"genus-0 integration asked for a genus {cls.g} class"
        raise PreconditionError(msg)
    total = Fraction(0)
    for graph, coeff in cls.terms:
        base = graph.graph
        value = coeff
        for v in range(base.num_vertices):
            exps = [p for w, p in graph.legs if w == v]
            for h, k in graph.edges:
                exps += [h[1]] if h[0] == v else []
                exps += [k[1]] if k[0] == v else []
            value *= _vertex_integral(tuple(exps), graph.kappa[v])
            if not value:
                break
        total += value
    return total


def genus0_consistency(r: int, a: list[int] | tuple[int, ...], shift: Shift = Shift.Last) -> tuple[Fraction, Fraction]:
    """(integral of W^r_{0,n}(a), correlator from the sl2 formula)."""
    cls = witten_class(WittenClassRequest(r, 0, tuple(a), shift))
    return genus0_integral(cls), correlator_sl2(CorrelatorKey(r, tuple(a)))


def _to_poly(pairs: list[tuple[int, Fraction]]) -> Any:
    r_sym = sympy.Symbol("r")
    points = [(x, sympy.Rational(y.numerator, y.denominator)) for x, y in pairs]
    if all(y == 0 for _, y in points):
        return R_RING.zero
    return R_RING(sympy.expand(interpolate(points, r_sym)))


def _poly_at(poly: Any, r: int) -> Fraction:
    return as_fraction(poly(r)) if poly else Fraction(0)


def _interpolate_stable(
    sample: Callable[[int], Mapping[K, Fraction]],
    start: int,
    jobs: int = 1,
    window: tuple[int, int] | None = None,
) -> tuple[dict[K, Any], tuple[int, ...], int]:
    """
    Fit every coefficient of ``sample(r)`` as a polynomial in r on all but the
    last two points of a window and require the last two to match. Without an
    explicit window, grow it and move its start until that holds.
    Returns (polynomials, window, start).
    """
    cache: dict[int, Mapping[K, Fraction]] = {}

    def fetch(rs: list[int]) -> None:
        todo = [x for x in rs if x not in cache]
        if not todo:
            return
        with ThreadPoolExecutor(max_workers=max(jobs, 1)) as pool:
            for x, values in zip(todo, pool.map(sample, todo), strict=True):
                cache[x] = values

    def attempt(rs: list[int]) -> tuple[dict[K, Any], int | None]:
        fetch(rs)
        keys = sorted({k for x in rs for k in cache[x]}, key=repr)
        fit, held = rs[:-2], rs[-2:]
        polys = {}
        for key in keys:
            polys[key] = _to_poly([(x, cache[x].get(key, Fraction(0))) for x in fit])
            for x in held:
                if _poly_at(polys[key], x) != cache[x].get(key, Fraction(0)):
                    return polys, x
        return polys, None

    if window is not None:
        rs = list(range(window[0], window[1] + 1))
        if len(rs) < 3:
            msg = "window too small / not yet polynomial: need at least 3 values of r"
            raise PolynomialityError(msg, window=rs)
        polys, bad = attempt(rs)
        if bad is not None:
            msg = "window too small / not yet polynomial"
            raise PolynomialityError(msg, window=rs, r=bad)
        return polys, tuple(rs), rs[0]

    last_bad = None
    for size in range(4, MAX_WINDOW + 1):
        for shift in range(MAX_START_SHIFT + 1):
            rs = list(range(start + shift, start + shift + size))
            polys, bad = attempt(rs)
            if bad is None:
                log.debug(f"interpolation stable on r = {rs[0]}..{rs[-1]}")
                return polys, tuple(rs), rs[0]
            last_bad = (rs, bad)
        log.debug(f"window of size {size} not yet stable, growing")
    assert last_bad is not None
    msg = "window too small / not yet polynomial"
    raise PolynomialityError(msg, window=last_bad[0], r=last_bad[1])


@dataclass(frozen=True)
class RPolynomialClass:
    g: int
    a: tuple[int, ...]
    basis: tuple[DecoratedGraph, ...]
    coefficients: tuple[Any, ...]
    sample_range: tuple[int, ...]
    threshold: int
    divisible: bool

    @property
    def n(self) -> int:
        return len(self.a)

    def coefficient(self, graph: DecoratedGraph) -> Any:
        canon = graph.canonical()
        for b, c in zip(self.basis, self.coefficients, strict=True):
            if b == canon:
                return c
        return R_RING.zero

    def evaluate(self, r: int) -> DecoratedClass:
        return DecoratedClass.from_terms(
            self.g, self.n, [(b, _poly_at(c, r)) for b, c in zip(self.basis, self.coefficients, strict=True)]
        )

    def constant_class(self) -> DecoratedClass:
        return self.evaluate(0)

    def degree_in_r(self) -> int:
        return max((c.degree() for c in self.coefficients if c), default=0)

    def to_json(self) -> dict[str, Any]:
        return {
            "g": self.g,
            "a": list(self.a),
            "sample_range": list(self.sample_range),
            "threshold": self.threshold,
            "divisible_by_r_minus_1": self.divisible,
            "terms": [
                {**b.to_json(), "coeff": str(c.as_expr())}
                for b, c in zip(self.basis, self.coefficients, strict=True)
            ],
        }


def _check_holomorphic_data(g: int, a: tuple[int, ...]) -> None:
    if g < 1 or not a or sum(a) != 2 * g - 2 or any(x < 0 for x in a):
        msg = f"need g >= 1 and nonnegative a summing to 2g-2, got g={g}, a={list(a)}"
        raise PreconditionError(msg)


def rescaled_witten_class(r: int, g: int, a: tuple[int, ...]) -> dict[DecoratedGraph, Fraction]:
    """r^{g-1} W^r_{g,n}(a) at the second shift, as {term: coefficient}."""
    cls = witten_class(WittenClassRequest(r, g, a, Shift.Second))
    scale = Fraction(r) ** (g - 1)
    return {graph: c * scale for graph, c in cls.terms}


def certify_polynomiality(
    g: int,
    a: list[int] | tuple[int, ...],
    r_window: tuple[int, int] | None = None,
    jobs: int = 1,
) -> RPolynomialClass:
    a = tuple(a)
    _check_holomorphic_data(g, a)
    start = max(a) + 3
    if r_window is not None and r_window[0] < start:
        msg = f"window must start above max(a) + 2 = {start - 1}, got r = {r_window[0]}"
        raise PreconditionError(msg)
    polys, rs, threshold = _interpolate_stable(lambda r: rescaled_witten_class(r, g, a), start, jobs, r_window)
    basis = tuple(sorted(polys, key=lambda gr: gr.sort_key()))
    coeffs = tuple(polys[b] for b in basis)
    divisible = all(_poly_at(c, 1) == 0 for c in coeffs)
    log.info(
        f"r^{g - 1} W for g={g} a={list(a)}: {len(basis)} terms polynomial from r = {threshold}, "
        f"window {rs[0]}..{rs[-1]}, divisible by r-1: {divisible}"
    )
    return RPolynomialClass(g, a, basis, coeffs, rs, threshold, divisible)


def weighting_sum(
    graph: StableGraph,
    r: int,
    a: list[int] | tuple[int, ...],
    leg_powers: tuple[int, ...],
    half_powers: tuple[int, ...],
) -> Fraction:
    """
    sum over weightings of prod_h P_{m_h}(r, a_h), restricted to weightings for
    which every vertex variable x_v with x^{r-1} = 1 has a trivial residue.
    """
    if len(leg_powers) != graph.n or len(half_powers) != 2 * graph.num_edges:
        msg = "one psi power per leg and per half-edge is required"
        raise PreconditionError(msg)
    total = Fraction(0)
    for w in enumerate_weightings(graph, r, a):
        ok = True
        for v, g_v in enumerate(graph.genera):
            power = g_v - 1
            power += sum(leg_powers[i] - w.legs[i] for i in graph.legs_at(v))
            power += sum(half_powers[h] - w.half_edges[h] for h in graph.half_edges_at(v))
            if power % (r - 1):
                ok = False
                break
        if not ok:
            continue
        term = Fraction(1)
        for i, m in enumerate(leg_powers):
            term *= p_value(m, r, w.legs[i])
        for h, m in enumerate(half_powers):
            term *= p_value(m, r, w.half_edges[h])
        total += term
    return total


def weighting_divisibility(
    graph: StableGraph,
    a: list[int] | tuple[int, ...],
    leg_powers: tuple[int, ...],
    half_powers: tuple[int, ...],
    start: int | None = None,
) -> tuple[Any, bool]:
    """The weighting sum as a polynomial in r and whether (r-1)^{h1} divides it."""
    begin = start if start is not None else max([*a, 0]) + 3
    polys, _, _ = _interpolate_stable(
        lambda r: {"S": weighting_sum(graph, r, a, leg_powers, half_powers)}, begin
    )
    poly = polys.get("S", R_RING.zero)
    divisor = (R_ONLY - 1) ** graph.h1
    return poly, not poly or poly.rem(divisor) == 0


def _bernoulli_at(m: int, x: int) -> Fraction:
    return as_fraction(bernoulli_polynomial(m)(x))


def _vertex_kappa_coefficients(budget: int) -> dict[int, Fraction]:
    # exp(sum B_{m+1}(1)/(m(m+1)) kappa_m) = exp(-sum c_m kappa_m)
    return {m: -_bernoulli_at(m + 1, 1) / (m * (m + 1)) for m in range(1, budget + 1)}


Monomial = tuple[tuple[int, ...], tuple[int, ...], tuple[tuple[int, ...], ...]]


def _bernoulli_numerator(
    graph: StableGraph, r: int, a: tuple[int, ...], degree: int
) -> dict[Monomial, Fraction]:
    """
    Numerator of the r -> 0 graph sum at integer r, before dividing by the edge
    factors (psi' + psi''): keys are (leg psi powers, half-edge psi powers,
    kappa monomials per vertex).
    """
    E = graph.num_edges
    kappa_polys = [
        [(mono, c) for mono, c in kappa_polynomial(_vertex_kappa_coefficients(degree), degree).items()]
        for _ in graph.genera
    ]
    out: dict[Monomial, Fraction] = defaultdict(Fraction)
    for w in enumerate_weightings(graph, r, a):
        leg_opts = [[(m, q_value(m, w.legs[i])) for m in range(degree + 1)] for i in range(graph.n)]
        edge_opts = [
            [
                (m, l, -q_value(m, w.half_edges[2 * e]) * q_value(l, w.half_edges[2 * e + 1]))
                for m in range(degree + 1)
                for l in range(degree + 1 - m)
                if (m, l) != (0, 0)
            ]
            for e in range(E)
        ]
        for legs in product(*leg_opts):
            leg_deg = sum(m for m, _ in legs)
            if leg_deg > degree:
                continue
            for edges in product(*edge_opts):
                edge_deg = sum(m + l for m, l, _ in edges)
                if leg_deg + edge_deg > degree:
                    continue
                halves = tuple(x for m, l, _ in edges for x in (m, l))
                for kappas in product(*kappa_polys):
                    if leg_deg + edge_deg + sum(sum(mono) for mono, _ in kappas) != degree:
                        continue
                    ok = True
                    for v, g_v in enumerate(graph.genera):
                        power = g_v - 1 + sum(kappas[v][0])
                        power += sum(legs[i][0] - w.legs[i] for i in graph.legs_at(v))
                        power += sum(halves[h] - w.half_edges[h] for h in graph.half_edges_at(v))
                        if power % (r - 1):
                            ok = False
                            break
                    if not ok:
                        continue
                    coeff = Fraction(1)
                    for _, c in legs:
                        coeff *= c
                    for _, _, c in edges:
                        coeff *= c
                    for _, c in kappas:
                        coeff *= c
                    if coeff:
                        key = (tuple(m for m, _ in legs), halves, tuple(mono for mono, _ in kappas))
                        out[key] += coeff
    return {k: v for k, v in out.items() if v}


def _divide_edges(
    graph: StableGraph, numer: Mapping[Monomial, Fraction]
) -> list[tuple[DecoratedGraph, Fraction]]:
    """Exact division of the numerator by prod_e (psi'_e + psi''_e)."""
    if not numer:
        return []
    n, E, V = graph.n, graph.num_edges, graph.num_vertices
    kappa_top = max((max(mono, default=0) for key in numer for mono in key[2]), default=0)
    names = [f"l{i}" for i in range(n)] + [f"h{h}" for h in range(2 * E)]
    names += [f"k{v}_{m}" for v in range(V) for m in range(1, kappa_top + 1)]
    P_RING, *gens = ring(",".join(names), QQ)
    leg_g, half_g, kap_g = gens[:n], gens[n : n + 2 * E], gens[n + 2 * E :]

    def kap(v: int, m: int) -> Any:
        return kap_g[v * kappa_top + m - 1]

    poly = P_RING.zero
    for (legs, halves, kappas), c in numer.items():
        term = P_RING(QQ(c.numerator, c.denominator))
        for i, e in enumerate(legs):
            term *= leg_g[i] ** e
        for h, e in enumerate(halves):
            term *= half_g[h] ** e
        for v, mono in enumerate(kappas):
            for m in mono:
                term *= kap(v, m)
        poly += term
    divisor = P_RING.one
    for e in range(E):
        divisor *= half_g[2 * e] + half_g[2 * e + 1]
    quotient, remainder = poly.div(divisor)
    if remainder:
        msg = "edge factor not divisible by psi' + psi'' at r = 0"
        raise EdgeDivisibilityError(msg, graph=graph)
    out = []
    for monom, c in quotient.terms():
        legs = tuple((graph.legs[i], monom[i]) for i in range(n))
        edges = tuple(
            ((x, monom[n + 2 * e]), (y, monom[n + 2 * e + 1])) for e, (x, y) in enumerate(graph.edges)
        )
        kappas = []
        for v in range(V):
            mono = []
            for m in range(1, kappa_top + 1):
                mono += [m] * monom[n + 2 * E + v * kappa_top + m - 1]
            kappas.append(tuple(sorted(mono)))
        out.append(
            (
                DecoratedGraph(graph.genera, tuple(kappas), legs, edges),
                Fraction(int(c.numerator), int(c.denominator)),
            )
        )
    return out


def _r0_limit_bernoulli(g: int, a: tuple[int, ...], jobs: int = 1) -> DecoratedClass:
    n = len(a)
    degree = g - 1
    items: list[tuple[DecoratedGraph, Fraction]] = []
    for graph in enumerate_stable_graphs(g, n, degree):
        polys, rs, _ = _interpolate_stable(
            lambda r, graph=graph: _bernoulli_numerator(graph, r, a, degree), max(a) + 3, jobs
        )
        at_zero = {k: _poly_at(p, 0) for k, p in polys.items()}
        at_zero = {k: v for k, v in at_zero.items() if v}
        sign = (-1) ** (g - 1 + graph.h1)
        weight = Fraction(sign, automorphism_order(graph))
        for dec, c in _divide_edges(graph, at_zero):
            items.append((dec, c * weight))
        log.debug(f"r -> 0 graph sum: {graph} interpolated on r = {rs[0]}..{rs[-1]}")
    return DecoratedClass.from_terms(g, n, items)


def r0_limit_class(
    g: int,
    a: list[int] | tuple[int, ...],
    degree_cap: int | None = None,
    method: Literal["certificate", "bernoulli"] = "certificate",
    jobs: int = 1,
) -> DecoratedClass:
    """(-1)^g times the r^0 term of r^{g-1} W, in degree g - 1."""
    a = tuple(a)
    _check_holomorphic_data(g, a)
    if degree_cap is not None and degree_cap < g - 1:
        msg = f"degree cap {degree_cap} below g - 1 = {g - 1}"
        raise PreconditionError(msg)
    if method == "bernoulli":
        result = _r0_limit_bernoulli(g, a, jobs)
    else:
        result = certify_polynomiality(g, a, jobs=jobs).constant_class().scale(TABLE_SIGN(g))
    log.info(f"r -> 0 limit for g={g} a={list(a)} via {method}: {len(result)} terms")
    return result


def kappa1_boundary_relation_g2(n: int) -> DecoratedClass:
    """kappa_1 minus its boundary expression on M_{2,n}bar, n = 1 or 2."""
    if n == 1:
        rhs = (
            psi_class(2, 1, 1)
            + boundary_divisor(2, 1, "sep").scale(Fraction(7, 5))
            + boundary_divisor(2, 1, "nonsep").scale(Fraction(1, 5))
        )
    elif n == 2:
        # pi^* psi_1 = psi_1 - alpha on M_{2,2}bar
        rhs = (
            psi_class(2, 2, 1)
            + psi_class(2, 2, 2)
            - boundary_divisor(2, 2, "alpha")
            + boundary_divisor(2, 2, "beta").scale(Fraction(7, 5))
            + boundary_divisor(2, 2, "gamma").scale(Fraction(7, 5))
            + boundary_divisor(2, 2, "nonsep").scale(Fraction(1, 5))
        )
    else:
        msg = f"the kappa_1 relation is tabulated for n = 1, 2, got {n}"
        raise PreconditionError(msg)
    return kappa_class(2, n, (1,)) - rhs


def eliminate_kappa1(cls: DecoratedClass) -> DecoratedClass:
    relation = kappa1_boundary_relation_g2(cls.n) if cls.g == 2 else None
    if relation is None:
        msg = f"kappa_1 elimination is available on M_{{2,n}}bar only, got genus {cls.g}"
        raise PreconditionError(msg)
    c = cls.coefficient(kappa_class(2, cls.n, (1,)).terms[0][0])
    return cls - relation.scale(c)


def named_classes(g: int, n: int) -> dict[str, DecoratedClass]:
    """The degree-one classes named in the genus-1 and genus-2 checks."""
    out = {"kappa1": kappa_class(g, n, (1,))}
    for i in range(1, n + 1):
        out[f"psi{i}"] = psi_class(g, n, i)
    if g >= 1:
        out["delta_nonsep"] = boundary_divisor(g, n, "nonsep")
    names = {(2, 1): ["sep"], (2, 2): ["alpha", "beta", "gamma"]}.get((g, n), [])
    for name in names:
        out["delta_sep" if name == "sep" else name] = boundary_divisor(g, n, name)
    return out


def named_coefficients(cls: DecoratedClass) -> dict[str, Fraction]:
    """
    Coefficients of ``cls`` against the named classes. Terms outside their span
    are reported under "other" as a count.
    """
    out: dict[str, Fraction] = {}
    covered = set()
    for name, named in named_classes(cls.g, cls.n).items():
        graph, unit = named.terms[0]
        c = cls.coefficient(graph) / unit
        covered.add(graph)
        if c:
            out[name] = c
    leftover = sum(1 for graph, _ in cls.terms if graph not in covered)
    if leftover:
        out["other"] = Fraction(leftover)
    return out


def _table_poly(num: Any, den: int = 24) -> Any:
    return num * QQ(1, den)


def genus2_table(a: tuple[int, ...]) -> dict[str, Any]:
    """
    Coefficients of W^r_{2,n}(a) at the second shift, as polynomials in r
    divided by r: the returned polynomial is r times the coefficient.
    """
    r = R_ONLY
    kappa1 = _table_poly((r - 1) * (r - 2) * (2 * r - 1))
    sep = _table_poly((r - 1) * (r - 2) * (2 * r - 13))
    nonsep = _table_poly(-(r - 1) * (r - 2))
    quad = _table_poly((r - 1) * (2 * r**2 - 29 * r + 74))
    if tuple(a) == (2,):
        return {"kappa1": kappa1, "psi1": -quad, "delta_sep": sep, "delta_nonsep": nonsep}
    if tuple(a) == (1, 1):
        return {
            "kappa1": kappa1,
            "psi1": -sep,
            "psi2": -sep,
            "alpha": quad,
            "beta": kappa1,
            "gamma": sep,
            "delta_nonsep": nonsep,
        }
    msg = f"no genus-2 table for a = {list(a)}"
    raise PreconditionError(msg)


def genus2_table_limit(a: tuple[int, ...]) -> dict[str, Fraction]:
    """(-1)^g times the constant term of r^{g-1} W read off the table."""
    g = 2
    out = {}
    for name, poly in genus2_table(a).items():
        # table polynomials are r times the coefficient of W
        rescaled = (poly * TABLE_RESCALE(g)).quo(R_ONLY)
        out[name] = TABLE_SIGN(g) * _poly_at(rescaled, 0)
    return out


def compare_genus2_table(a: tuple[int, ...], r: int) -> dict[str, tuple[Fraction, Fraction]]:
    """Per named class: (computed coefficient of W at r, table value at r)."""
    a = tuple(a)
    cls = witten_class(WittenClassRequest(r, 2, a, Shift.Second))
    computed = named_coefficients(cls)
    out = {}
    for name, poly in genus2_table(a).items():
        out[name] = (computed.get(name, Fraction(0)), _poly_at(poly, r) / r)
    if "other" in computed:
        out["other"] = (computed["other"], Fraction(0))
    return out


def format_named(coeffs: Mapping[str, Fraction]) -> str:
    parts = [f"{rational_str(c)}*{name}" for name, c in coeffs.items()]
    return " + ".join(parts) if parts else "0"
