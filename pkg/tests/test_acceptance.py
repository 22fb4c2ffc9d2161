import pytest

from rspin_cohft.acceptance import run_suites, suite_consistency
from rspin_cohft.errors import PreconditionError


def test_consistency_reaches_six_points():
    results, checks = suite_consistency(max_r=5)
    # r = 5 has the single six-point key (3, 3, 3, 3, 3, 3)
    assert results["genus0_compared"][6] == 1
    assert set(results["genus0_compared"]) == {3, 4, 5, 6}
    assert all(c.passed for c in checks)


def test_unknown_suite():
    with pytest.raises(PreconditionError, match="unknown suites"):
        run_suites(["nope"])
