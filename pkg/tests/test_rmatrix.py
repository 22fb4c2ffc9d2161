from fractions import Fraction
from math import factorial

import pytest
from sympy import QQ

from rspin_cohft.algebra_core import A_VAR, R_VAR, Series, as_fraction
from rspin_cohft.data import Shift
from rspin_cohft.errors import ForbiddenResidueError
from rspin_cohft.frobenius import FrobeniusPoint, euler_grading_matrices
from rspin_cohft.rmatrix import (
    b_coefficient,
    b_series,
    bernoulli_polynomial,
    p_at_r_zero,
    p_polynomial,
    p_value,
    q_polynomial,
    q_value,
    r_matrix_tau,
    r_matrix_tilde,
    symplectic_residual,
    verify_r_recursion,
)


def b_closed(m: int, r: int) -> Fraction:
    if r == 3:
        return Fraction(factorial(6 * m), factorial(2 * m) * factorial(3 * m)) * Fraction(-1, 1728) ** m
    return Fraction(factorial(4 * m), factorial(m) * factorial(2 * m)) * Fraction(-1, 256) ** m


@pytest.mark.parametrize("r", [3, 4])
def test_b_series_factorial_form(r):
    series = b_series(r, 0, 8).series
    assert series.coeffs == tuple(b_closed(m, r) for m in range(9))


def test_b_series_first_coefficients():
    assert b_coefficient(3, 0) == Fraction(-5, 144)
    assert b_coefficient(4, 0) == Fraction(-3, 64)
    assert b_coefficient(4, 2) == Fraction(5, 64)


def test_b41_is_one():
    assert b_series(4, 1, 10).series == Series.constant(1, 10)


def test_b_series_periodicity():
    base = b_series(5, 1, 6).series
    assert b_series(5, 6, 6).series == base.shift(1)
    assert b_series(5, 11, 6).series == base.shift(2)


def test_forbidden_residue():
    with pytest.raises(ForbiddenResidueError, match="forbidden residue"):
        b_series(4, 7, 5)


@pytest.mark.parametrize("r", range(2, 9))
def test_symplectic(r):
    for a in range(r - 1):
        assert symplectic_residual(r, a, 15).is_zero()


@pytest.mark.parametrize("shift", list(Shift))
@pytest.mark.parametrize("r", range(2, 9))
def test_r_matrix(r, shift):
    build = r_matrix_tau if shift is Shift.Last else r_matrix_tilde
    R, Rinv = build(r, 13)
    xi, mu = euler_grading_matrices(FrobeniusPoint(r, shift))
    assert verify_r_recursion(R, xi, mu, 12)
    assert (R * Rinv).is_identity()


def test_p_closed_forms():
    r, a = R_VAR, A_VAR
    p1 = QQ(1, 2) * a * (r - 1 - a) - QQ(1, 24) * (2 * r - 1) * (r - 2)
    p2 = (
        QQ(1, 8) * a**4
        - QQ(1, 12) * a**3 * (5 * r - 1)
        + QQ(1, 48) * a**2 * (20 * r**2 - 5 * r - 4)
        - QQ(1, 48) * a * (r - 1) * (6 * r**2 + 7 * r - 2)
        + QQ(1, 1152) * (2 * r - 1) * (r - 2) * (2 * r**2 + 19 * r + 2)
    )
    assert p_polynomial(1).poly == p1
    assert p_polynomial(2).poly == p2


@pytest.mark.parametrize("m", range(1, 7))
def test_p_difference_equation(m):
    for r in range(2, 8):
        for a in range(1, r):
            lhs = p_value(m, r, a) - p_value(m, r, a - 1)
            rhs = Fraction(2 * m * r - r - 2 * a, 2) * p_value(m - 1, r, a - 1)
            assert lhs == rhs
        assert p_value(m, r, 0) == p_value(m, r, r - 1)


@pytest.mark.parametrize("m", range(7))
def test_q_is_p_at_zero(m):
    assert p_at_r_zero(m) == q_polynomial(m)


def test_q_values():
    assert q_value(0, 3) == 1
    assert q_value(1, 0) == Fraction(-1, 12)
    assert as_fraction(bernoulli_polynomial(2)(0)) == Fraction(1, 6)
