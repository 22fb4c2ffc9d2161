from fractions import Fraction
from itertools import product

import pytest

from rspin_cohft.errors import HypothesisError, PreconditionError
from rspin_cohft.relations_betti import (
    a_matrix_entry,
    betti_bound,
    betti_table,
    d_series,
    k_coefficient,
    m_matrix,
    mu_matrix_entry,
    relation_boundary,
    relation_fz2,
    relation_interior,
    sin_residue,
    verify_ma_triangular,
    witten_degree_fraction,
)
from rspin_cohft.strata import DecoratedClass, DecoratedGraph, kappa_class
from rspin_cohft.witten_diff import named_coefficients


def _proportional(u, v):
    return all(x * w == y * z for x, y in zip(u, v) for z, w in zip(u, v))


@pytest.mark.parametrize(
    ("r", "a", "expected"),
    [
        (4, 0, (12, -12, 0)),
        (4, 2, (-20, -12, Fraction(8, 3))),
        (5, 1, (9, -21, 1)),
    ],
)
def test_m11_relation(r, a, expected):
    named = named_coefficients(relation_boundary(r, 1, [a], 1))
    got = tuple(named.get(k, Fraction(0)) for k in ("psi1", "kappa1", "delta_nonsep"))
    assert "other" not in named
    assert any(got)
    assert _proportional(got, expected)
    assert got[0] + got[1] + 12 * got[2] == 0


def test_boundary_needs_excess_degree():
    assert witten_degree_fraction(4, 2, (2,)) == 1
    with pytest.raises(HypothesisError, match="not above Witten degree"):
        relation_boundary(4, 2, (2,), 1)


def test_boundary_above_dimension_is_empty():
    cls = relation_boundary(4, 1, [0], 2)
    assert cls.is_zero()
    assert cls.degree_cap == 2


def test_interior_matches_halved_form():
    kappa = kappa_class(2, 0, (1,)).scale(Fraction(3, 64))
    interior = relation_interior(4, 2, 0, [], [], 1)
    assert interior.expression.terms == kappa.terms
    assert relation_fz2(2, [], 1).terms == kappa.terms
    assert interior.to_json()["d"] == 1


def _forget_last_point(cls):
    """p_*(psi_{n+1} X) for the principal terms of X, with kappa_a = p^*kappa_a + psi_{n+1}^a."""
    g, n = cls.g, cls.n - 1
    items = []
    for graph, coeff in cls.principal_part().terms:
        kept, (_, power) = graph.legs[:n], graph.legs[n]
        kappa = graph.kappa[0]
        for moved in product((False, True), repeat=len(kappa)):
            b = power + sum(k for k, m in zip(kappa, moved) if m)
            rest = [k for k, m in zip(kappa, moved) if not m]
            c = coeff if b else coeff * (2 * g - 2 + n)
            mono = tuple(sorted([*rest, b] if b else rest))
            items.append((DecoratedGraph((g,), (mono,), kept, ()), c))
    return DecoratedClass.from_terms(g, n, items)


def _assert_proportional(cls, other):
    assert not other.is_zero()
    assert [gr for gr, _ in cls.terms] == [gr for gr, _ in other.terms]
    ratio = cls.terms[0][1] / other.terms[0][1]
    assert ratio != 0
    assert cls.terms == other.scale(ratio).terms


@pytest.mark.parametrize(("r", "g", "a", "d"), [(3, 2, [], 1), (3, 2, [1], 2), (4, 2, [0], 2)])
def test_interior_is_principal_part_of_boundary(r, g, a, d):
    boundary = relation_boundary(r, g, a, d).principal_part()
    interior = relation_interior(r, g, len(a), a, [], d).expression
    _assert_proportional(boundary, interior)


@pytest.mark.parametrize(("r", "g", "a", "s", "d"), [(3, 2, [], 1, 2), (3, 2, [], 0, 1)])
def test_interior_is_pushforward_of_boundary(r, g, a, s, d):
    boundary = relation_boundary(r, g, [*a, s], d)
    interior = relation_interior(r, g, len(a), a, [s], d).expression
    _assert_proportional(_forget_last_point(boundary), interior)


@pytest.mark.parametrize(
    ("args", "reason"),
    [
        ((4, 2, 0, [], [3], 2), "r-1 mod r"),
        ((4, 2, 0, [], [], 0), "rd"),
        ((4, 2, 0, [], [1], 1), "parity"),
        ((4, 0, 1, [0], [], 1), "unstable"),
    ],
)
def test_interior_hypotheses(args, reason):
    with pytest.raises(HypothesisError, match=f"hypotheses not met.*{reason}"):
        relation_interior(*args)


def test_interior_insertion_count():
    with pytest.raises(PreconditionError, match="insertions given"):
        relation_interior(4, 1, 2, [0], [], 1)


def test_fz2_hypotheses():
    with pytest.raises(HypothesisError, match="g = 1 < 2"):
        relation_fz2(1, [], 1)
    with pytest.raises(HypothesisError, match="2d"):
        relation_fz2(4, [1], 2)


def test_d_series():
    assert d_series(0, 3).coeff(1) == Fraction(-3, 64)
    assert d_series(1, 3).coeff(0) == 0
    assert d_series(1, 3).coeff(1) == Fraction(1, 8)
    with pytest.raises(PreconditionError):
        d_series(-1, 3)


def test_k_coefficients():
    assert k_coefficient((), ()) == 1
    assert k_coefficient((), (1,)) == Fraction(3, 64)
    assert k_coefficient((1, 1), (1,)) == 0


@pytest.mark.parametrize(
    ("tau", "mu", "value"),
    [
        ((1,), (1,), 8),
        ((1, 1), (2,), 560),
        ((1, 1), (1, 1), 128),
        ((1, 1, 1), (2, 1), 13440),
        ((2, 1, 1), (2, 2), 53760),
        ((2,), (1, 1), 0),
    ],
)
def test_a_matrix(tau, mu, value):
    assert a_matrix_entry(tau, mu) == value


def test_a_matrix_size_mismatch():
    assert a_matrix_entry((1,), (2,)) == 0


def test_ma_is_triangular():
    assert m_matrix(1) == [[Fraction(3, 64)]]
    assert mu_matrix_entry((2,), (1,)) == k_coefficient((1,), (1,))
    report = verify_ma_triangular(1)
    assert report.product == [[Fraction(3, 8)]]
    assert report.passed


@pytest.mark.parametrize("d", range(2, 7))
def test_ma_is_triangular_up_to_six(d):
    report = verify_ma_triangular(d, residue_max=8)
    assert report.triangular
    assert report.diagonal_nonzero
    assert all(report.vanishing.values())


def test_sin_residues():
    assert sin_residue(4) == -8
    assert sin_residue(6) == 0
    assert sin_residue(8) == 0
    assert sin_residue(5) == 0
    assert sin_residue(0) == 0


def test_betti():
    assert betti_bound(7, 2) == 2
    assert betti_table(10)[8] == 1
    for g in range(2, 12):
        assert betti_bound(g, g - 1) == 0
        assert betti_bound(g, g + 2) == 0
        assert betti_bound(g, 0) == 1
    with pytest.raises(PreconditionError, match="g >= 2"):
        betti_bound(1, 0)


def test_fz2_is_the_r4_interior_relation():
    interior = relation_interior(4, 2, 0, [], [4], 2)
    assert relation_fz2(2, [2], 2).terms == interior.expression.terms
