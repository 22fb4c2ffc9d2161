from fractions import Fraction

import pytest
from sympy import QQ, Rational
from sympy.polys.ring_series import rs_exp, rs_log, rs_mul, rs_series_inversion

from rspin_cohft.algebra_core import (
    X_RING,
    X_VAR,
    Series,
    SeriesMatrix,
    as_fraction,
    count_partitions,
    identity_matrix,
    make_partition,
    matrix_coefficient,
    matrix_mul,
    parse_rational,
    partition_automorphisms,
    partitions_of,
    rational_str,
    series_add,
    series_exp,
    series_inverse,
    series_log,
    series_mul,
    series_neg,
    series_shift,
    series_sub,
)
from rspin_cohft.errors import NotInvertibleError, PreconditionError


def test_series_inverse():
    one_minus_t = Series.from_coeffs([1, -1], order=5)
    geometric = series_inverse(one_minus_t)
    assert geometric.coeffs == (Fraction(1),) * 6
    assert series_mul(one_minus_t, geometric) == Series.constant(1, 5)


def test_inverse_needs_unit():
    with pytest.raises(NotInvertibleError, match="not invertible"):
        Series.monomial(1, 4).inverse()


def test_exp_log_are_inverse():
    x = Series.from_coeffs([0, 1, Fraction(1, 2), 3], order=6)
    assert series_log(series_exp(x)) == x
    assert series_exp(Series.monomial(1, 4)).coeffs == tuple(
        Fraction(1, f) for f in (1, 1, 2, 6, 24)
    )


def test_add_sub_neg():
    a = Series.from_coeffs([1, 2, 3])
    b = Series.from_coeffs([0, 1, Fraction(1, 3)])
    assert series_sub(series_add(a, b), b) == a
    assert series_add(a, series_neg(a)).is_zero()


def test_shift_keeps_order():
    a = Series.from_coeffs([1, 2, 3])
    assert series_shift(a, 1).coeffs == (0, 1, 2)
    assert series_shift(a, 5).is_zero()
    with pytest.raises(PreconditionError):
        a.shift(-1)


def test_even_odd_split():
    even, odd = Series.from_coeffs([1, 2, 3, 4]).even_odd_split()
    assert even.coeffs == (1, 0, 3, 0)
    assert odd.coeffs == (0, 2, 0, 4)


def test_matrix_helpers():
    m = SeriesMatrix.from_coefficient_matrices([[[1, 0], [0, 1]], [[0, 1], [0, 0]]])
    assert matrix_mul(m, identity_matrix(2, 1)) == m
    assert matrix_coefficient(m, 1) == [[0, 1], [0, 0]]
    assert not m.is_identity()
    assert identity_matrix(3, 4).is_identity()


def test_as_fraction():
    assert as_fraction(QQ(3, 4)) == Fraction(3, 4)
    assert as_fraction(Rational(-2, 6)) == Fraction(-1, 3)
    assert as_fraction(5) == Fraction(5)


def test_partitions():
    assert partitions_of(4) == ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))
    assert partitions_of(4, 2) == ((4,), (3, 1), (2, 2))
    assert partitions_of(0) == ((),)
    assert count_partitions(5, 0) == 0
    assert make_partition([1, 3, 2]) == (3, 2, 1)
    assert partition_automorphisms((2, 1, 1, 1)) == 6
    with pytest.raises(PreconditionError, match="positive"):
        make_partition([2, 0])


def test_rational_text():
    assert parse_rational("-3/64") == Fraction(-3, 64)
    assert parse_rational("7") == Fraction(7)
    assert rational_str(Fraction(6, 4)) == "3/2"
    assert rational_str(-2) == "-2"


def _as_poly(s):
    return sum((QQ(c.numerator, c.denominator) * X_VAR**i for i, c in enumerate(s)), X_RING.zero)


def _as_series(poly, order):
    return Series.from_coeffs([as_fraction(poly.get((i,), 0)) for i in range(order + 1)])


def test_series_matches_ring_series():
    a = Series.from_coeffs([1, 2, Fraction(1, 3), -1])
    b = Series.from_coeffs([0, 1, -2, Fraction(5, 2)])
    pa, pb = _as_poly(a), _as_poly(b)
    assert a * b == _as_series(rs_mul(pa, pb, X_VAR, 4), 3)
    assert a.inverse() == _as_series(rs_series_inversion(pa, X_VAR, 4), 3)
    assert b.exp() == _as_series(rs_exp(pb, X_VAR, 4), 3)
    assert a.log() == _as_series(rs_log(pa, X_VAR, 4), 3)
