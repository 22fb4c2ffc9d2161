"""
Frobenius algebra data of the r-spin state space at the two shift points,
specialized to phi = 1.

Basis index a in 0..r-2 stands for the frame vector at the given point. The
metric is eta(e_a, e_b) = [a + b == r - 2] at both points.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from rspin_cohft.data import Shift
from rspin_cohft.errors import PreconditionError, UnstableError
from rspin_cohft.sl2_genus0 import sl2_invariant_dim

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrobeniusPoint:
    r: int
    shift: Shift
    phi: int = field(default=1, init=False)

    def __post_init__(self) -> None:
        if self.r < 2:
            msg = f"r must be at least 2, got {self.r}"
            raise PreconditionError(msg)

    @property
    def dim(self) -> int:
        return self.r - 1


@dataclass(frozen=True)
class TqftValue:
    value: Fraction


@dataclass
class IdempotentReport:
    r: int
    frame: np.ndarray
    metric_error: float
    product_error: float
    tolerance: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.metric_error < self.tolerance and self.product_error < self.tolerance


def _check_index(r: int, *indices: int) -> None:
    for x in indices:
        if not 0 <= x <= r - 2:
            msg = f"index {x} out of range 0..{r - 2}"
            raise PreconditionError(msg)


def tetrahedron(r: int, a: int, b: int, c: int) -> bool:
    """a+b+c even, triangle inequalities, and a+b+c <= 2r-4."""
    s = a + b + c
    return s % 2 == 0 and a <= b + c and b <= a + c and c <= a + b and s <= 2 * r - 4


def quantum_product(point: FrobeniusPoint, a: int, b: int) -> list[Fraction]:
    r = point.r
    _check_index(r, a, b)
    out = [Fraction(0)] * point.dim
    if point.shift is Shift.Last:
        for c in range(point.dim):
            if tetrahedron(r, a, b, c):
                out[c] = Fraction(1)
    else:
        c = a + b if a + b <= r - 2 else a + b - r + 1
        out[c] = Fraction(1)
    return out


def fusion_rule_mismatches(r: int) -> list[tuple[int, int, int]]:
    """Triples where the last-shift product differs from the level-r sl2 fusion rule."""
    point = FrobeniusPoint(r, Shift.Last)
    bad = []
    for a in range(point.dim):
        for b in range(point.dim):
            product = quantum_product(point, a, b)
            for c in range(point.dim):
                expected = sl2_invariant_dim([a, b, c]) if a + b + c <= 2 * r - 4 else 0
                if product[c] != expected:
                    bad.append((a, b, c))
    return bad


def structure_constants(point: FrobeniusPoint) -> list[list[list[Fraction]]]:
    return [[quantum_product(point, a, b) for b in range(point.dim)] for a in range(point.dim)]


def metric(point: FrobeniusPoint) -> list[list[Fraction]]:
    r = point.r
    return [[Fraction(int(a + b == r - 2)) for b in range(r - 1)] for a in range(r - 1)]


def euler_grading_matrices(
    point: FrobeniusPoint,
) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """
    (xi, mu) with xi[row][col] the matrix of multiplication by the Euler field
    and mu the diagonal grading operator.
    """
    r, dim = point.r, point.dim
    xi = [[Fraction(0)] * dim for _ in range(dim)]
    if point.shift is Shift.Last:
        for a in range(dim):
            xi[r - 2 - a][a] = Fraction(2)
    else:
        for a in range(dim):
            row = a + 1 if a + 1 <= r - 2 else 0
            xi[row][a] = Fraction(r - 1)
    mu = [[Fraction(0)] * dim for _ in range(dim)]
    for a in range(dim):
        mu[a][a] = Fraction(2 * a - r + 2, 2 * r)
    return xi, mu


def idempotent_frame(r: int, tolerance: float = 1e-9) -> IdempotentReport:
    if r < 2:
        msg = f"r must be at least 2, got {r}"
        raise PreconditionError(msg)
    point = FrobeniusPoint(r, Shift.Last)
    dim = r - 1
    ks = np.arange(1, r)
    aa = np.arange(dim)
    # frame[k-1] holds the coordinates of v_k
    frame = np.sqrt(2 / r) * np.sin(np.outer(ks, aa + 1) * np.pi / r)

    eta = np.array(metric(point), dtype=float)
    expected_eta = np.diag([(-1.0) ** (k - 1) for k in ks])
    metric_error = float(np.max(np.abs(frame @ eta @ frame.T - expected_eta)))

    consts = np.array(structure_constants(point), dtype=float)
    product_error = 0.0
    for i, k in enumerate(ks):
        for j in range(dim):
            prod = np.einsum("a,b,abc->c", frame[i], frame[j], consts)
            target = np.zeros(dim)
            if i == j:
                target = np.sqrt(r / 2) / np.sin(k * np.pi / r) * frame[i]
            product_error = max(product_error, float(np.max(np.abs(prod - target))))
    report = IdempotentReport(r, frame, metric_error, product_error, tolerance)
    log.debug(f"idempotents r={r}: metric err {metric_error:.2e}, product err {product_error:.2e}")
    return report


def _check_stable(g: int, n: int) -> None:
    if g < 0 or 2 * g - 2 + n <= 0:
        msg = f"unstable (g, n) = ({g}, {n})"
        raise UnstableError(msg)


def tqft_exact(point: FrobeniusPoint, g: int, insertions: list[int] | tuple[int, ...]) -> TqftValue:
    r = point.r
    _check_stable(g, len(insertions))
    _check_index(r, *insertions)
    if point.shift is Shift.Second:
        ok = (g - 1 - sum(insertions)) % (r - 1) == 0
        return TqftValue(Fraction((r - 1) ** g if ok else 0))
    return TqftValue(_tqft_last(r, g, tuple(sorted(insertions))))


@lru_cache(maxsize=None)
def _tqft_last(r: int, g: int, xs: tuple[int, ...]) -> Fraction:
    n = len(xs)
    if g == 0 and n == 3:
        a, b, c = xs
        return Fraction(int(tetrahedron(r, a, b, r - 2 - c)))
    if n >= 2 and (g, n) != (0, 3):
        # split off the first two points on a pair of pants
        a, b, *rest = xs
        total = Fraction(0)
        for x in range(r - 1):
            if tetrahedron(r, a, b, r - 2 - x):
                total += _tqft_last(r, g, tuple(sorted((r - 2 - x, *rest))))
        return total
    if n == 1:
        (a,) = xs
        return sum(
            (_tqft_last(r, g - 1, tuple(sorted((a, x, r - 2 - x)))) for x in range(r - 1)),
            Fraction(0),
        )
    # n == 0, g >= 2
    return sum(
        (_tqft_last(r, g - 1, tuple(sorted((x, r - 2 - x)))) for x in range(r - 1)),
        Fraction(0),
    )


def tqft_trig(r: int, g: int, insertions: list[int] | tuple[int, ...]) -> float:
    n = len(insertions)
    _check_stable(g, n)
    _check_index(r, *insertions)
    ks = np.arange(1, r)
    angle = ks * np.pi / r
    terms = (-1.0) ** ((ks - 1) * (g - 1)) / np.sin(angle) ** (2 * g - 2 + n)
    for a in insertions:
        terms = terms * np.sin((a + 1) * angle)
    return float((r / 2) ** (g - 1) * np.sum(terms))


def tqft_nonvanishing_report(r: int, max_euler: int) -> list[tuple[int, tuple[int, ...]]]:
    """
    Return the (g, insertions) with g >= 1, sum(x) = r(g-1) mod 2 and
    2g-2+n <= max_euler where the shift-last TQFT value is not positive.
    Empty means the check passed.
    """
    point = FrobeniusPoint(r, Shift.Last)
    failures = []
    for g in range(1, max_euler // 2 + 2):
        for n in range(max_euler - 2 * g + 3):
            if 2 * g - 2 + n <= 0 or 2 * g - 2 + n > max_euler:
                continue
            for xs in combinations_with_replacement(range(r - 1), n):
                if (sum(xs) - r * (g - 1)) % 2:
                    continue
                if tqft_exact(point, g, xs).value <= 0:
                    failures.append((g, xs))
    return failures
