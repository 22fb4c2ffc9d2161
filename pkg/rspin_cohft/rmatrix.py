"""
R-matrices of the r-spin theory at both shift points (phi = 1).

Matrices are ``SeriesMatrix`` values indexed ``[row][col]``; the superscript of
the usual notation is the row. At the last shift the entries come from the
hypergeometric B-series. At the second shift they come from the polynomials
P_m(r, a).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy
from sympy import QQ, ring
from sympy.polys.appellseqs import bernoulli_poly
from sympy.polys.polyfuncs import interpolate
from sympy.polys.ring_series import rs_exp

from rspin_cohft.algebra_core import (
    A_ONLY,
    A_RING,
    A_VAR,
    R_VAR,
    RA_RING,
    X_RING,
    Series,
    SeriesMatrix,
    as_fraction,
)
from rspin_cohft.errors import ForbiddenResidueError, InvariantViolation, PreconditionError

log = logging.getLogger(__name__)

# z tracks the series degree of the Bernoulli exponential
ZA_RING, Z_VAR, _ = ring("z,a", QQ)


@dataclass(frozen=True)
class BSeries:
    r: int
    a: int
    series: Series


@dataclass(frozen=True)
class PmPolynomial:
    m: int
    poly: object

    def __call__(self, r: int, a: int) -> Fraction:
        return as_fraction(self.poly(r, a))  # type: ignore[operator]


def _check_r(r: int) -> None:
    if r < 2:
        msg = f"r must be at least 2, got {r}"
        raise PreconditionError(msg)


@lru_cache(maxsize=None)
def _b_series_base(r: int, a: int, order: int) -> Series:
    coeffs = [Fraction(1)]
    scale = Fraction(-1, 16 * r * r)
    for i in range(1, order + 1):
        factor = ((2 * i - 1) * r - 2 * (a + 1)) * ((2 * i - 1) * r + 2 * (a + 1))
        coeffs.append(coeffs[-1] * factor * scale / i)
    return Series(tuple(coeffs))


def b_series(r: int, a: int, order: int) -> BSeries:
    """B_{r,a}(T); a >= r is reduced through B_{r,a+rb} = T^b B_{r,a}."""
    _check_r(r)
    if a < 0:
        msg = f"a must be nonnegative, got {a}"
        raise PreconditionError(msg)
    if a % r == r - 1:
        msg = f"forbidden residue: a = {a} is r-1 mod r for r = {r}"
        raise ForbiddenResidueError(msg)
    base, shift = a % r, a // r
    return BSeries(r, a, _b_series_base(r, base, order).shift(shift))


def b_coefficient(r: int, a: int) -> Fraction:
    """b_{r,a}, the T coefficient of B_{r,a}."""
    return b_series(r, a, 1).series.coeff(1)


def symplectic_residual(r: int, a: int, order: int) -> Series:
    even_a, odd_a = b_series(r, a, order).series.even_odd_split()
    even_b, odd_b = b_series(r, r - 2 - a, order).series.even_odd_split()
    return even_a * even_b - odd_a * odd_b - 1


def r_matrix_tau(r: int, order: int) -> tuple[SeriesMatrix, SeriesMatrix]:
    _check_r(r)
    dim = r - 1
    zero = Series.constant(0, order)
    R = [[zero] * dim for _ in range(dim)]
    Rinv = [[zero] * dim for _ in range(dim)]
    for a in range(dim):
        even, odd = b_series(r, a, order).series.even_odd_split()
        dual_even, _ = b_series(r, r - 2 - a, order).series.even_odd_split()
        # built by addition: for r even the middle column has both entries on the diagonal
        Rinv[a][a] = Rinv[a][a] + even
        Rinv[r - 2 - a][a] = Rinv[r - 2 - a][a] + odd
        R[a][a] = R[a][a] + dual_even
        R[r - 2 - a][a] = R[r - 2 - a][a] - odd
    return (
        SeriesMatrix(tuple(tuple(row) for row in R)),
        SeriesMatrix(tuple(tuple(row) for row in Rinv)),
    )


def verify_r_recursion(
    R: SeriesMatrix,
    xi: list[list[Fraction]],
    mu: list[list[Fraction]],
    order: int,
) -> bool:
    """True iff [R_{m+1}, xi] = (m + mu) R_m for all m < order."""
    if R.dim != len(xi) or R.dim != len(mu):
        msg = f"dimension mismatch: R is {R.dim}, xi is {len(xi)}, mu is {len(mu)}"
        raise PreconditionError(msg)
    if R.order < order:
        msg = f"R is truncated at {R.order}, cannot check up to {order}"
        raise PreconditionError(msg)
    xi_m = np.array(xi, dtype=object)
    mu_m = np.array(mu, dtype=object)
    ident = np.array(
        [[Fraction(int(i == j)) for j in range(R.dim)] for i in range(R.dim)], dtype=object
    )
    for m in range(order):
        lower = np.array(R.coefficient(m), dtype=object)
        upper = np.array(R.coefficient(m + 1), dtype=object)
        lhs = upper @ xi_m - xi_m @ upper
        rhs = (m * ident + mu_m) @ lower
        if not (lhs == rhs).all():
            log.debug(f"R recursion fails at m={m}")
            return False
    return True


@lru_cache(maxsize=None)
def _p_table(r: int, m: int, width: int) -> tuple[Fraction, ...]:
    """P_m(r, a) for a = 0..width-1 by the defining recursion at integer r."""
    if m == 0:
        return (Fraction(1),) * width
    prev = _p_table(r, m - 1, width)
    head = [Fraction(1, 2) * (2 * m * r - r - 2 * b) * prev[b - 1] for b in range(1, width)]
    constant = sum(
        (
            Fraction((r - 1 - b) * (2 * m * r - b) * (2 * m * r - r - 2 * b)) * prev[b - 1]
            for b in range(1, r - 1)
        ),
        Fraction(0),
    ) / (4 * m * r * (r - 1))
    out = [-constant]
    for b in range(1, width):
        out.append(out[-1] + head[b - 1])
    return tuple(out)


def p_value(m: int, r: int, a: int) -> Fraction:
    if a < 0:
        msg = f"P_m is tabulated for a >= 0, got {a}"
        raise PreconditionError(msg)
    width = max(a + 1, r + 1, 2 * m + 1)
    return _p_table(r, m, width)[a]


@lru_cache(maxsize=None)
def p_polynomial(m: int) -> PmPolynomial:
    """P_m(r, a) rebuilt by interpolating pointwise values, then checked."""
    if m < 0:
        msg = f"m must be nonnegative, got {m}"
        raise PreconditionError(msg)
    if m == 0:
        return PmPolynomial(0, RA_RING.one)
    r_sym, a_sym = sympy.symbols("r a")
    a_points = range(2 * m + 1)
    r_points = range(2, 2 * m + 4)
    per_r = {}
    for r in r_points:
        pairs = [(a, _to_sympy(p_value(m, r, a))) for a in a_points]
        per_r[r] = sympy.Poly(interpolate(pairs, a_sym), a_sym)
    expr = sympy.Integer(0)
    for k in range(2 * m + 1):
        pairs = [(r, per_r[r].coeff_monomial(a_sym**k)) for r in r_points]
        expr += interpolate(pairs, r_sym) * a_sym**k
    poly = RA_RING(sympy.expand(expr))
    _validate_p(m, poly)
    log.debug(f"P_{m} rebuilt with {len(poly.terms())} terms")
    return PmPolynomial(m, poly)


def _to_sympy(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _validate_p(m: int, poly: object) -> None:
    prev = p_polynomial(m - 1).poly
    shifted = poly.compose(A_VAR, A_VAR - 1)  # type: ignore[attr-defined]
    rhs = QQ(1, 2) * (2 * m * R_VAR - R_VAR - 2 * A_VAR) * prev.compose(A_VAR, A_VAR - 1)  # type: ignore[attr-defined]
    if poly - shifted != rhs:  # type: ignore[operator]
        msg = f"P_{m} fails the difference equation in a"
        raise InvariantViolation(msg)
    at_zero = poly.compose(A_VAR, RA_RING.zero)  # type: ignore[attr-defined]
    at_top = poly.compose(A_VAR, R_VAR - 1)  # type: ignore[attr-defined]
    if at_zero != at_top:
        msg = f"P_{m} fails P_m(r, 0) = P_m(r, r - 1)"
        raise InvariantViolation(msg)


def r_matrix_tilde(r: int, order: int) -> tuple[SeriesMatrix, SeriesMatrix]:
    _check_r(r)
    dim = r - 1
    R_mats = []
    Rinv_mats = []
    for m in range(order + 1):
        R_m = [[Fraction(0)] * dim for _ in range(dim)]
        Rinv_m = [[Fraction(0)] * dim for _ in range(dim)]
        for a in range(dim):
            for b in range(dim):
                if (b + m - a) % (r - 1):
                    continue
                R_m[b][a] = Fraction(-r * (r - 1)) ** -m * p_value(m, r, r - 2 - b)
                Rinv_m[b][a] = Fraction(r * (r - 1)) ** -m * p_value(m, r, a)
        R_mats.append(R_m)
        Rinv_mats.append(Rinv_m)
    return (
        SeriesMatrix.from_coefficient_matrices(R_mats),
        SeriesMatrix.from_coefficient_matrices(Rinv_mats),
    )


def bernoulli_polynomial(m: int) -> object:
    if m < 0:
        msg = f"m must be nonnegative, got {m}"
        raise PreconditionError(msg)
    return X_RING(bernoulli_poly(m, sympy.Symbol("x")))


@lru_cache(maxsize=None)
def q_series_from_bernoulli(order: int) -> object:
    """exp(-sum_{m>=1} z^m B_{m+1}(a+1)/(m(m+1))) in QQ[a][[z]] up to z^order."""
    a_sym, x_sym = sympy.symbols("a x")
    exponent = ZA_RING.zero
    for m in range(1, order + 1):
        shifted = bernoulli_poly(m + 1, x_sym).subs(x_sym, a_sym + 1)
        bern = ZA_RING(sympy.expand(shifted))
        exponent -= Z_VAR**m * bern * QQ(1, m * (m + 1))
    return rs_exp(exponent, Z_VAR, order + 1)


@lru_cache(maxsize=None)
def q_polynomial(m: int) -> object:
    """Q_m(a) as an element of QQ[a], the z^m coefficient of the Bernoulli exponential."""
    if m < 0:
        msg = f"m must be nonnegative, got {m}"
        raise PreconditionError(msg)
    series = q_series_from_bernoulli(max(m, 1))
    out = A_RING.zero
    for (zpow, apow), coeff in series.terms():  # type: ignore[attr-defined]
        if zpow == m:
            out += A_RING(coeff) * A_ONLY**apow
    return out


def q_value(m: int, a: int) -> Fraction:
    return as_fraction(q_polynomial(m)(a))  # type: ignore[operator]


def p_at_r_zero(m: int) -> object:
    """P_m(0, a) moved into QQ[a]."""
    poly = p_polynomial(m).poly
    out = A_RING.zero
    for (rpow, apow), coeff in poly.terms():  # type: ignore[attr-defined]
        if rpow == 0:
            out += A_RING(coeff) * A_ONLY**apow
    return out
