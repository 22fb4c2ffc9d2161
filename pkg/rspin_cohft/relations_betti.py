"""
Tautological relations from the r-spin theory and the r = 4 Betti bounds.

``relation_boundary`` reads relations on the compactification off the
above-Witten-degree parts of the shift-last class. ``relation_interior`` builds
the restriction to the open moduli space directly as a psi/kappa polynomial.
The rest of the module is the linear algebra bounding the Betti numbers of the
tautological ring of M_g with the r = 4 relations.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from math import factorial, prod

from sympy import QQ, ring
from sympy.polys.ring_series import rs_asin, rs_pow, rs_series_inversion, rs_sin

from rspin_cohft.algebra_core import (
    Partition,
    Series,
    count_partitions,
    make_partition,
    partition_automorphisms,
    partitions_of,
)
from rspin_cohft.data import Shift
from rspin_cohft.errors import HypothesisError, PreconditionError
from rspin_cohft.givental import givental_action
from rspin_cohft.rmatrix import b_series
from rspin_cohft.strata import DecoratedClass, DecoratedGraph, pushforward_kappa

log = logging.getLogger(__name__)

U_RING, U_VAR = ring("u", QQ)


def witten_degree_fraction(r: int, g: int, a: list[int] | tuple[int, ...]) -> Fraction:
    return Fraction((r - 2) * (g - 1) + sum(a), r)


def relation_boundary(r: int, g: int, a: list[int] | tuple[int, ...], d: int) -> DecoratedClass:
    """The degree-d part of the shift-last class, zero in cohomology above the Witten degree."""
    n = len(a)
    D = witten_degree_fraction(r, g, a)
    if d <= D:
        msg = f"not above Witten degree: d = {d} <= D = {D}"
        raise HypothesisError(msg)
    if d > 3 * g - 3 + n:
        return DecoratedClass(g, n, (), d)
    return givental_action(r, Shift.Last, g, a, d).degree_part(d)


@dataclass(frozen=True)
class InteriorRelation:
    g: int
    n: int
    r: int
    a: tuple[int, ...]
    sigma: Partition
    d: int
    expression: DecoratedClass
    scale: Fraction = Fraction(1)

    def to_json(self) -> dict[str, object]:
        return {
            "g": self.g,
            "n": self.n,
            "r": self.r,
            "a": list(self.a),
            "sigma": list(self.sigma),
            "d": self.d,
            "scale": str(self.scale),
            "expression": self.expression.to_json(),
        }


def _check_interior_hypotheses(
    r: int, g: int, n: int, a: tuple[int, ...], sigma: Partition, d: int
) -> None:
    if 2 * g - 2 + n <= 0:
        msg = f"hypotheses not met: (g, n) = ({g}, {n}) is unstable"
        raise HypothesisError(msg)
    forbidden = [x for x in (*a, *sigma) if x < 0 or x % r == r - 1]
    if forbidden:
        msg = f"hypotheses not met: {forbidden} is r-1 mod r"
        raise HypothesisError(msg)
    total = (r - 2) * (g - 1) + sum(sigma) + sum(a)
    if r * d <= total:
        msg = f"hypotheses not met: rd = {r * d} <= {total}"
        raise HypothesisError(msg)
    if (r * d - total) % 2:
        msg = f"hypotheses not met: rd = {r * d} and {total} differ in parity"
        raise HypothesisError(msg)


def _pushforward_polynomial(
    g: int,
    n: int,
    leg_series: list[Series],
    forgotten: list[Series],
    extra: Series,
    d: int,
) -> DecoratedClass:
    """
    Degree-d part of prod_i L_i(psi_i) * sum_m 1/m! p_* prod_j F_j(psi) prod_{k<=m} extra(psi).
    Forgotten series are in psi with the psi of the forgotten point already included,
    so a psi^e coefficient pushes forward to kappa_{e-1}.
    """
    acc: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = defaultdict(Fraction)
    leg_opts = [[(e, s.coeff(e)) for e in range(d + 1) if s.coeff(e)] for s in leg_series]
    fixed_opts = [[(e, s.coeff(e)) for e in range(1, d + 2) if s.coeff(e)] for s in forgotten]
    extra_opts = [(e, extra.coeff(e)) for e in range(2, d + 2) if extra.coeff(e)]
    for legs in product(*leg_opts):
        leg_deg = sum(e for e, _ in legs)
        if leg_deg > d:
            continue
        leg_coeff = prod((c for _, c in legs), start=Fraction(1))
        exps = tuple(e for e, _ in legs)
        for fixed in product(*fixed_opts):
            fixed_deg = sum(e - 1 for e, _ in fixed)
            if leg_deg + fixed_deg > d:
                continue
            fixed_coeff = prod((c for _, c in fixed), start=Fraction(1))
            rest = d - leg_deg - fixed_deg
            for m in range(rest + 1):
                for more in product(extra_opts, repeat=m):
                    if sum(e - 1 for e, _ in more) != rest:
                        continue
                    coeff = leg_coeff * fixed_coeff / factorial(m)
                    coeff *= prod((c for _, c in more), start=Fraction(1))
                    bs = tuple(sorted(e - 1 for e, _ in (*fixed, *more)))
                    for mono, pc in pushforward_kappa(bs, g, n):
                        acc[(exps, mono)] += coeff * pc
    items = [
        (DecoratedGraph((g,), (mono,), tuple((0, e) for e in exps), ()), c)
        for (exps, mono), c in acc.items()
    ]
    return DecoratedClass.from_terms(g, n, items, d)


def relation_interior(
    r: int, g: int, n: int, a: list[int] | tuple[int, ...], sigma: Partition | list[int], d: int
) -> InteriorRelation:
    a = tuple(a)
    sigma = make_partition(sigma) if sigma else ()
    if len(a) != n:
        msg = f"{len(a)} insertions given for n = {n}"
        raise PreconditionError(msg)
    _check_interior_hypotheses(r, g, n, a, sigma, d)
    order = d + 2
    legs = [b_series(r, x, order).series for x in a]
    # B_{r, s + r}(psi) = psi B_{r, s}(psi)
    forgotten = [b_series(r, s + r, order).series for s in sigma]
    base = b_series(r, 0, order).series
    extra = (1 - base).shift(1)
    expression = _pushforward_polynomial(g, n, legs, forgotten, extra, d)
    log.info(f"interior relation r={r} g={g} a={list(a)} sigma={list(sigma)} d={d}: {len(expression)} terms")
    return InteriorRelation(g, n, r, a, sigma, d, expression)


def d_series(s: int, order: int) -> Series:
    """D_s(T) = B_{4, 2s}(T), with D_1 = B_{4,2} - B_{4,0} so that it has no constant term."""
    if s < 0:
        msg = f"s must be nonnegative, got {s}"
        raise PreconditionError(msg)
    series = b_series(4, 2 * s, order).series
    if s == 1:
        series = series - b_series(4, 0, order).series
    return series


def relation_fz2(g: int, sigma: Partition | list[int], d: int) -> DecoratedClass:
    """
    Degree-d part of sum_m 1/m! p_* prod_j (T D_{sigma_j})(psi) prod_k (T - T D_0)(psi)
    on M_g, the halved-partition form of the r = 4 relations.
    """
    sigma = make_partition(sigma) if sigma else ()
    if g < 2:
        msg = f"hypotheses not met: g = {g} < 2"
        raise HypothesisError(msg)
    if 2 * d < g + sum(sigma):
        msg = f"hypotheses not met: 2d = {2 * d} < g + |sigma| = {g + sum(sigma)}"
        raise HypothesisError(msg)
    order = d + 2
    forgotten = [d_series(s, order).shift(1) for s in sigma]
    extra = (1 - d_series(0, order)).shift(1)
    return _pushforward_polynomial(g, 0, [], forgotten, extra, d)


def _injections(k: int, m: int) -> list[tuple[int, ...]]:
    return list(permutations(range(m), k))


def k_coefficient(sigma: Partition, tau: Partition) -> Fraction:
    """Coefficient of p_* prod psi^{tau_i + 1} in the r = 4 relation for sigma."""
    sigma, tau = tuple(sigma), tuple(tau)
    if len(sigma) > len(tau):
        return Fraction(0)
    order = max(tau, default=0) + 1
    d_coeffs = {s: d_series(s, order) for s in {*sigma, 0}}
    total = Fraction(0)
    for phi in _injections(len(sigma), len(tau)):
        term = Fraction(1)
        for i, j in enumerate(phi):
            term *= d_coeffs[sigma[i]].coeff(tau[j])
            if not term:
                break
        if not term:
            continue
        for j in set(range(len(tau))) - set(phi):
            term *= d_coeffs[0].coeff(tau[j])
        total += term
    sign = (-1) ** (len(tau) - len(sigma))
    return sign * total / partition_automorphisms(tau)


def _double_factorial(n: int) -> int:
    return prod(range(n, 0, -2), start=1)


def a_matrix_entry(tau: Partition, mu: Partition) -> Fraction:
    tau, mu = tuple(tau), tuple(mu)
    if sum(tau) != sum(mu):
        log.warning(f"A entry requested for |tau| = {sum(tau)} != |mu| = {sum(mu)}, using 0")
        return Fraction(0)
    weight = Fraction(1, prod((_double_factorial(2 * j + 1) for j in tau), start=1))
    total = Fraction(0)
    # a refinement is the fibre over each part of mu, not a labelling of tau
    seen: set[tuple[Partition, ...]] = set()
    for psi in product(range(len(mu)), repeat=len(tau)):
        fibres: list[list[int]] = [[] for _ in mu]
        for i, k in enumerate(psi):
            fibres[k].append(tau[i])
        if any(sum(f) != k for f, k in zip(fibres, mu, strict=True)):
            continue
        key = tuple(tuple(sorted(f, reverse=True)) for f in fibres)
        if key in seen:
            continue
        seen.add(key)
        term = Fraction(partition_automorphisms(tau))
        for f, k in zip(fibres, mu, strict=True):
            term = term * factorial(len(f) + 2 * k + 1) / partition_automorphisms(tuple(sorted(f)))
        total += term
    return total * weight


def _minus(sigma: Partition) -> Partition:
    return tuple(p - 1 for p in sigma if p > 1)


def _ordered_partitions(d: int) -> list[Partition]:
    """Partitions of d, fewer parts equal to 1 first, then lexicographic."""
    return sorted(partitions_of(d), key=lambda p: (p.count(1), p))


def m_matrix(d: int) -> list[list[Fraction]]:
    parts = _ordered_partitions(d)
    return [[k_coefficient(_minus(s), t) for t in parts] for s in parts]


def mu_matrix_entry(sigma: Partition, tau: Partition) -> Fraction:
    return k_coefficient(_minus(tuple(sigma)), tuple(tau))


def ka_sum(sigma: Partition, k: int) -> Fraction:
    """sum over tau of K(sigma, tau) A_{tau, (k)}."""
    return sum(
        (k_coefficient(sigma, tau) * a_matrix_entry(tau, (k,)) for tau in partitions_of(k)),
        Fraction(0),
    )


@lru_cache(maxsize=None)
def sin_residue(e: int) -> Fraction:
    """[1/sin^e theta]_{t^{-1}} for theta = asin(sqrt t)/2."""
    if e <= 0:
        return Fraction(0)
    if e % 2:
        return Fraction(0)
    prec = e + 2
    theta = rs_asin(U_VAR, U_VAR, prec + 1) * QQ(1, 2)
    sine = rs_sin(theta, U_VAR, prec + 1)
    # sin theta = u h(u) with h(0) = 1/2
    h = U_RING.zero
    for (power,), c in sine.terms():
        h += c * U_VAR ** (power - 1)
    inv = rs_pow(rs_series_inversion(h, U_VAR, prec), e, U_VAR, prec)
    c = inv.coeff(U_VAR ** (e - 2)) if e >= 2 else QQ(0)
    return Fraction(int(c.numerator), int(c.denominator))


@dataclass
class MaReport:
    d: int
    partitions: list[Partition]
    product: list[list[Fraction]]
    triangular: bool
    diagonal_nonzero: bool
    vanishing: dict[str, bool] = field(default_factory=dict)
    residues: dict[int, Fraction] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (
            self.triangular
            and self.diagonal_nonzero
            and all(self.vanishing.values())
            and self.residues.get(4, Fraction(0)) != 0
            and all(v == 0 for e, v in self.residues.items() if e >= 6)
        )


def verify_ma_triangular(d: int, residue_max: int = 12) -> MaReport:
    if d < 1:
        msg = f"d must be at least 1, got {d}"
        raise PreconditionError(msg)
    parts = _ordered_partitions(d)
    M = m_matrix(d)
    A = [[a_matrix_entry(t, mu) for mu in parts] for t in parts]
    size = len(parts)
    MA = [[sum((M[i][k] * A[k][j] for k in range(size)), Fraction(0)) for j in range(size)] for i in range(size)]
    ones = [p.count(1) for p in parts]
    triangular = all(
        MA[i][j] == 0
        for i in range(size)
        for j in range(size)
        if i != j and not ones[i] < ones[j]
    )
    diagonal = all(MA[i][i] != 0 for i in range(size))

    vanishing = {}
    for k in range(1, d + 1):
        for s in range(k - 1):
            for sigma in partitions_of(s):
                vanishing[f"k={k} sigma={list(sigma)}"] = ka_sum(sigma, k) == 0
        vanishing[f"k={k} sigma={[k - 1] if k > 1 else []} nonzero"] = ka_sum((k - 1,) if k > 1 else (), k) != 0
    residues = {e: sin_residue(e) for e in range(4, residue_max + 1, 2)}
    report = MaReport(d, parts, MA, triangular, diagonal, vanishing, residues)
    log.info(f"MA at d={d}: {size}x{size}, triangular={triangular}, diagonal nonzero={diagonal}")
    return report


def betti_bound(g: int, d: int) -> int:
    """|P(d, g-1-d)|, the bound on dim RH^d(M_g)."""
    if g < 2 or d < 0:
        msg = f"betti bound needs g >= 2 and d >= 0, got g={g}, d={d}"
        raise PreconditionError(msg)
    return count_partitions(d, max(g - 1 - d, 0))


def betti_table(g: int) -> dict[int, int]:
    return {d: betti_bound(g, d) for d in range(g)}
