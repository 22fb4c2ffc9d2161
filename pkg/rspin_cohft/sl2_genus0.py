"""
Genus-0 r-spin correlators.

Two independent oracles compute the same numbers: the closed formula through
sl2 invariant dimensions, and the WDVV reduction from the two initial
conditions. The cyclic polynomial identity that drives the equivalence proof is
exposed for checking as well.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial

from sympy import ZZ, ring

from rspin_cohft.errors import DegreeMismatchError, PreconditionError

log = logging.getLogger(__name__)

T_RING, T_VAR = ring("t", ZZ)
TUV_RING, T_, U_, V_ = ring("t,u,v", ZZ)


@dataclass(frozen=True)
class CorrelatorKey:
    r: int
    insertions: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.insertions)
        if self.r < 2:
            msg = f"r must be at least 2, got {self.r}"
            raise PreconditionError(msg)
        if n < 3:
            msg = f"a genus-0 correlator needs n >= 3 insertions, got {n}"
            raise PreconditionError(msg)
        bad = [x for x in self.insertions if not 0 <= x <= self.r - 2]
        if bad:
            msg = f"insertions {bad} out of range 0..{self.r - 2}"
            raise PreconditionError(msg)
        if n > self.r + 1:
            msg = f"no admissible key with n = {n} > r + 1 = {self.r + 1}"
            raise DegreeMismatchError(msg)
        expected = (n - 2) * self.r - 2
        if sum(self.insertions) != expected:
            msg = (
                f"degree mismatch: sum of insertions is {sum(self.insertions)}, "
                f"expected (n-2)r-2 = {expected}"
            )
            raise DegreeMismatchError(msg)

    @property
    def n(self) -> int:
        return len(self.insertions)


def sl2_invariant_dim(weights: list[int] | tuple[int, ...]) -> int:
    """
    dim of the sl2-invariants in rho_{b_1} x ... x rho_{b_n}.

    The character prod (1 + t + ... + t^b) is palindromic of degree 2s; the
    multiplicity of rho_0 is [t^s] - [t^{s+1}].
    """
    total = sum(weights)
    if total % 2:
        return 0
    char = T_RING.one
    for b in weights:
        char *= sum((T_VAR**i for i in range(b + 1)), T_RING.zero)
    s = total // 2
    return int(char.coeff(T_VAR**s)) - int(char.coeff(T_VAR ** (s + 1)))


def correlator_sl2(key: CorrelatorKey) -> Fraction:
    n, r = key.n, key.r
    dim = sl2_invariant_dim([r - 2 - a for a in key.insertions])
    return Fraction(factorial(n - 3), r ** (n - 3)) * dim


def correlator_wdvv(key: CorrelatorKey) -> Fraction:
    return _wdvv(key.r, tuple(sorted(key.insertions, reverse=True)))


def _correlator(r: int, xs: tuple[int, ...]) -> Fraction:
    return _wdvv(r, tuple(sorted(xs, reverse=True)))


@lru_cache(maxsize=None)
def _wdvv(r: int, xs: tuple[int, ...]) -> Fraction:
    n = len(xs)
    if any(x < 0 or x > r - 2 for x in xs):
        return Fraction(0)
    if sum(xs) != (n - 2) * r - 2:
        return Fraction(0)
    if n == 3:
        return Fraction(1)
    if xs[-1] == 0:
        return Fraction(0)
    if xs == (r - 2, r - 2, 1, 1):
        return Fraction(1, r)

    # c >= 2 here: c = 1 forces n = 4 and the base case above
    a, b, c, *rest = xs
    x = tuple(rest)
    A, B, C, D = c - 1, 1, a, b

    value = (
        _correlator(r, (*x, B, D, A + C))
        + _correlator(r, (*x, A, C, D + 1))
        - _correlator(r, (*x, A, B, C + D))
    )
    value += _split_sum(r, x, (A, C), (B, D)) - _split_sum(r, x, (A, B), (C, D))
    return value


def _split_sum(
    r: int, x: tuple[int, ...], left: tuple[int, int], right: tuple[int, int]
) -> Fraction:
    """Quadratic WDVV terms over proper splits of the extra insertions."""
    k = len(x)
    total = Fraction(0)
    for size in range(1, k):
        for idx in combinations(range(k), size):
            x_i = tuple(x[i] for i in idx)
            x_j = tuple(x[i] for i in range(k) if i not in idx)
            mu = (size + 1) * r - 2 - sum(x_i) - sum(left)
            if not 0 <= mu <= r - 2:
                continue
            lhs = _correlator(r, (*x_i, *left, mu))
            if lhs:
                total += lhs * _correlator(r, (*x_j, *right, r - 2 - mu))
    return total


def _cyclic_factor(p: object, q: object, w: object, x: int) -> object:
    """(p^x q - q^x p)/(p - q), times (pqw)^(-x) when x < 0."""
    if x >= 0:
        num = p**x * q - q**x * p  # type: ignore[operator]
    else:
        num = w ** (-x) * (q ** (1 - x) - p ** (1 - x))  # type: ignore[operator]
    return num.exquo(p - q)  # type: ignore[attr-defined,operator]


def cyclic_identity_residual(x: list[int] | tuple[int, ...]) -> object:
    """The cyclically symmetrized split sum; the zero polynomial for every x."""
    k = len(x)

    def term(t: object, u: object, v: object) -> object:
        acc = TUV_RING.zero
        for size in range(k + 1):
            for idx in combinations(range(k), size):
                prod = TUV_RING(factorial(size) * factorial(k - size))
                for i in range(k):
                    if i in idx:
                        prod *= _cyclic_factor(t, v, u, x[i])
                    else:
                        prod *= _cyclic_factor(u, v, t, x[i])
                acc += prod
        return (t - u) * v * acc  # type: ignore[operator]

    residual = term(T_, U_, V_) + term(U_, V_, T_) + term(V_, T_, U_)  # type: ignore[operator]
    log.debug(f"cyclic identity for x={tuple(x)}: {len(residual.terms())} residual terms")
    return residual
