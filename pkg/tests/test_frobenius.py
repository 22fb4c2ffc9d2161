from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
import pytest
from numpy.testing import assert_allclose

from rspin_cohft.data import Shift
from rspin_cohft.errors import PreconditionError, UnstableError
from rspin_cohft.frobenius import (
    FrobeniusPoint,
    euler_grading_matrices,
    fusion_rule_mismatches,
    idempotent_frame,
    metric,
    quantum_product,
    structure_constants,
    tqft_exact,
    tqft_nonvanishing_report,
    tqft_trig,
)


def test_last_shift_product_is_fusion():
    point = FrobeniusPoint(5, Shift.Last)
    assert quantum_product(point, 1, 1) == [1, 0, 1, 0]
    assert quantum_product(point, 0, 2) == [0, 0, 1, 0]
    # level truncation: 3 x 3 only reaches weights up to 2r - 4 - 3
    assert quantum_product(point, 3, 3) == [1, 0, 0, 0]


def test_second_shift_product_is_cyclic():
    point = FrobeniusPoint(5, Shift.Second)
    assert quantum_product(point, 1, 2) == [0, 0, 0, 1]
    assert quantum_product(point, 2, 3) == [0, 1, 0, 0]


@pytest.mark.parametrize("shift", list(Shift))
def test_product_is_commutative_and_associative(shift):
    point = FrobeniusPoint(6, shift)
    c = structure_constants(point)
    dim = point.dim
    for a in range(dim):
        for b in range(dim):
            assert c[a][b] == c[b][a]
            for e in range(dim):
                left = [sum(c[a][b][x] * c[x][e][y] for x in range(dim)) for y in range(dim)]
                right = [sum(c[b][e][x] * c[a][x][y] for x in range(dim)) for y in range(dim)]
                assert left == right


@pytest.mark.parametrize("r", range(2, 11))
def test_fusion_rules(r):
    assert fusion_rule_mismatches(r) == []


def test_metric_is_antidiagonal():
    assert metric(FrobeniusPoint(4, Shift.Last)) == [[0, 0, 1], [0, 1, 0], [1, 0, 0]]


def test_euler_field():
    xi, mu = euler_grading_matrices(FrobeniusPoint(4, Shift.Second))
    assert xi[1][0] == 3
    assert xi[0][2] == 3
    assert mu[0][0] == Fraction(-1, 4)
    assert mu[2][2] == Fraction(1, 4)


@pytest.mark.parametrize("r", range(2, 9))
def test_idempotent_frame(r):
    report = idempotent_frame(r)
    assert report.passed
    assert report.frame.shape == (r - 1, r - 1)


@pytest.mark.parametrize("r", range(2, 8))
def test_trig_matches_exact(r):
    point = FrobeniusPoint(r, Shift.Last)
    for g in range(3):
        for n in range(5 - 2 * g):
            if 2 * g - 2 + n <= 0:
                continue
            for xs in combinations_with_replacement(range(r - 1), n):
                exact = float(tqft_exact(point, g, xs).value)
                assert_allclose(tqft_trig(r, g, xs), exact, atol=1e-9)


def test_genus_one_counts_weights():
    assert tqft_exact(FrobeniusPoint(6, Shift.Last), 1, [0]).value == 5


def test_second_shift_selection_rule():
    point = FrobeniusPoint(4, Shift.Second)
    assert tqft_exact(point, 2, [1]).value == 9
    assert tqft_exact(point, 2, [2]).value == 0


def test_nonvanishing():
    assert tqft_nonvanishing_report(5, 4) == []


def test_unstable():
    with pytest.raises(UnstableError, match="unstable"):
        tqft_exact(FrobeniusPoint(4, Shift.Last), 0, [1, 1])


def test_bad_r():
    with pytest.raises(PreconditionError):
        FrobeniusPoint(1, Shift.Last)


def test_frame_is_orthogonal():
    frame = idempotent_frame(5).frame
    assert_allclose(np.abs(frame @ frame.T), np.eye(4), atol=1e-9)
