from fractions import Fraction
from itertools import combinations_with_replacement

import pytest

from rspin_cohft.errors import DegreeMismatchError, PreconditionError
from rspin_cohft.sl2_genus0 import (
    CorrelatorKey,
    correlator_sl2,
    correlator_wdvv,
    cyclic_identity_residual,
    sl2_invariant_dim,
)


@pytest.mark.parametrize(
    ("weights", "expected"),
    [([1, 1], 1), ([1, 1, 1, 1], 2), ([2, 2, 2], 1), ([1, 2], 0), ([0, 0, 0], 1), ([3, 1], 0)],
)
def test_sl2_invariant_dim(weights, expected):
    assert sl2_invariant_dim(weights) == expected


@pytest.mark.parametrize("r", range(3, 11))
def test_initial_four_point(r):
    key = CorrelatorKey(r, (1, 1, r - 2, r - 2))
    assert correlator_sl2(key) == Fraction(1, r)
    assert correlator_wdvv(key) == Fraction(1, r)


def test_three_point_is_one():
    assert correlator_sl2(CorrelatorKey(5, (1, 1, 1))) == 1


@pytest.mark.parametrize("r", range(2, 8))
def test_oracles_agree(r):
    for n in range(3, min(6, r + 1) + 1):
        for xs in combinations_with_replacement(range(r - 1), n):
            if sum(xs) != (n - 2) * r - 2:
                continue
            key = CorrelatorKey(r, xs)
            assert correlator_sl2(key) == correlator_wdvv(key), xs


def test_degree_mismatch():
    with pytest.raises(DegreeMismatchError, match="degree mismatch"):
        CorrelatorKey(5, (3, 3, 3, 3, 1, 1))


def test_out_of_range():
    with pytest.raises(PreconditionError, match="out of range"):
        CorrelatorKey(4, (3, 1, 2))


@pytest.mark.parametrize("x", [(0,), (2,), (1, 3), (-1, 2), (2, 2, -1), (1, 0, 2, 3)])
def test_cyclic_identity(x):
    assert not cyclic_identity_residual(list(x))
