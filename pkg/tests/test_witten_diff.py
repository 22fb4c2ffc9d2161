from fractions import Fraction

import pytest

from rspin_cohft.data import Shift
from rspin_cohft.errors import PolynomialityError, PreconditionError
from rspin_cohft.strata import (
    DecoratedClass,
    StableGraph,
    boundary_class,
    kappa_class,
    psi_class,
)
from rspin_cohft.witten_diff import (
    R_ONLY,
    VANISHES,
    WittenClassRequest,
    certify_polynomiality,
    compare_genus2_table,
    eliminate_kappa1,
    format_named,
    genus0_consistency,
    genus0_integral,
    genus2_table_limit,
    kappa1_boundary_relation_g2,
    named_classes,
    named_coefficients,
    r0_limit_class,
    weighting_divisibility,
    weighting_sum,
    witten_class,
    witten_degree,
)

LOOP_11 = StableGraph((0,), (0,), ((0, 0),))


def _from_named(g, n, coeffs):
    named = named_classes(g, n)
    total = DecoratedClass.zero(g, n)
    for name, c in coeffs.items():
        total = total + named[name].scale(c)
    return total


@pytest.mark.parametrize(
    ("r", "g", "a", "degree"),
    [(3, 1, (1,), VANISHES), (5, 0, (1, 1, 3, 3), 1), (5, 0, (1, 1, 1), 0), (4, 2, (2,), 1), (4, 1, (0,), 0)],
)
def test_witten_degree(r, g, a, degree):
    assert witten_degree(r, g, a) == degree


def test_witten_degree_out_of_range():
    with pytest.raises(PreconditionError, match="out of range"):
        witten_degree(4, 0, (1, 1, 3))


def test_requests_are_validated():
    with pytest.raises(PreconditionError, match="r must be at least 2"):
        WittenClassRequest(1, 1, (0,))
    with pytest.raises(PreconditionError, match="unstable"):
        WittenClassRequest(5, 0, (1, 1))


def test_three_point_class_is_fundamental():
    cls = witten_class(WittenClassRequest(5, 0, (1, 1, 1)))
    assert cls.terms == DecoratedClass.fundamental(0, 3).terms


def test_genus_one_degree_zero():
    for r in range(3, 7):
        cls = witten_class(WittenClassRequest(r, 1, (0,), Shift.Second))
        assert cls.terms == DecoratedClass.fundamental(1, 1, r - 1).terms


def test_vanishing_class():
    assert witten_class(WittenClassRequest(3, 1, (1,))).is_zero()


def test_cap_below_degree():
    with pytest.raises(PreconditionError, match="below the Witten degree"):
        witten_class(WittenClassRequest(5, 0, (1, 1, 3, 3)), degree_cap=0)


def test_cap_above_degree():
    req = WittenClassRequest(5, 0, (1, 1, 1, 2, 3))
    plain = witten_class(req)
    capped = witten_class(req, degree_cap=5)
    assert plain.degree_cap == 1
    assert capped.degree_cap == 2
    assert capped.terms == plain.terms


def test_genus0_integrals():
    assert genus0_integral(psi_class(0, 4, 1)) == 1
    assert genus0_integral(kappa_class(0, 4, (1,))) == 1
    assert genus0_integral(psi_class(0, 5, 1, 2)) == 1
    assert genus0_integral(psi_class(0, 5, 1) + psi_class(0, 5, 2).scale(0)) == 0
    split = StableGraph((0, 0), (0, 0, 1, 1), ((0, 1),))
    assert genus0_integral(boundary_class(split)) == 1
    with pytest.raises(PreconditionError, match="genus-0"):
        genus0_integral(psi_class(1, 1, 1))


@pytest.mark.parametrize(("r", "a"), [(5, (1, 1, 3, 3)), (4, (1, 1, 2, 2)), (6, (2, 2, 2, 4))])
def test_genus0_consistency(r, a):
    integral, correlator = genus0_consistency(r, a)
    assert integral == correlator
    assert integral != 0


def test_genus0_consistency_six_points():
    integral, correlator = genus0_consistency(5, (3, 3, 3, 3, 3, 3))
    assert integral == correlator


def test_genus0_value():
    assert genus0_consistency(5, (1, 1, 3, 3)) == (Fraction(1, 5), Fraction(1, 5))


def test_weighting_sum_on_loop():
    for r in range(3, 8):
        assert weighting_sum(LOOP_11, r, (0,), (0,), (0, 0)) == r - 1
    poly, divisible = weighting_divisibility(LOOP_11, (0,), (0,), (0, 0))
    assert poly == R_ONLY - 1
    assert divisible


def test_weighting_sum_shapes():
    with pytest.raises(PreconditionError, match="one psi power"):
        weighting_sum(LOOP_11, 5, (0,), (0,), (0,))


def test_genus2_table_limit():
    assert genus2_table_limit((2,)) == {
        "kappa1": Fraction(-1, 12),
        "psi1": Fraction(37, 12),
        "delta_sep": Fraction(-13, 12),
        "delta_nonsep": Fraction(-1, 12),
    }


def test_kappa1_relation_g2():
    assert named_coefficients(kappa1_boundary_relation_g2(1)) == {
        "kappa1": 1,
        "psi1": -1,
        "delta_sep": Fraction(-7, 5),
        "delta_nonsep": Fraction(-1, 5),
    }
    assert named_coefficients(kappa1_boundary_relation_g2(2)) == {
        "kappa1": 1,
        "psi1": -1,
        "psi2": -1,
        "alpha": 1,
        "beta": Fraction(-7, 5),
        "gamma": Fraction(-7, 5),
        "delta_nonsep": Fraction(-1, 5),
    }
    with pytest.raises(PreconditionError, match="n = 1, 2"):
        kappa1_boundary_relation_g2(3)


def test_eliminate_kappa1_one_point():
    cls = eliminate_kappa1(_from_named(2, 1, genus2_table_limit((2,))))
    assert named_coefficients(cls) == {
        "psi1": 3,
        "delta_sep": Fraction(-6, 5),
        "delta_nonsep": Fraction(-1, 10),
    }


def test_eliminate_kappa1_two_points():
    cls = eliminate_kappa1(_from_named(2, 2, genus2_table_limit((1, 1))))
    assert named_coefficients(cls) == {
        "psi1": 1,
        "psi2": 1,
        "alpha": -3,
        "beta": Fraction(-1, 5),
        "gamma": Fraction(-6, 5),
        "delta_nonsep": Fraction(-1, 10),
    }


def test_eliminate_kappa1_genus():
    with pytest.raises(PreconditionError, match="M_\\{2,n\\}bar only"):
        eliminate_kappa1(psi_class(1, 1, 1))


def test_named_coefficients():
    cls = psi_class(2, 1, 1) + named_classes(2, 1)["delta_sep"].scale(2) + kappa_class(2, 1, (2,))
    assert named_coefficients(cls) == {"psi1": 1, "delta_sep": 2, "other": 1}
    assert format_named({"psi1": Fraction(3), "delta_sep": Fraction(-1, 2)}) == "3*psi1 + -1/2*delta_sep"
    assert format_named({}) == "0"


def test_genus2_table_at_r5():
    for a in ((2,), (1, 1)):
        for name, (got, expected) in compare_genus2_table(a, 5).items():
            assert got == expected, name


def test_genus_one_limit_is_fundamental():
    for method in ("certificate", "bernoulli"):
        cls = r0_limit_class(1, (0,), method=method)
        assert cls.terms == DecoratedClass.fundamental(1, 1).terms


def test_genus_one_certificate():
    cert = certify_polynomiality(1, (0,))
    assert cert.divisible
    assert cert.degree_in_r() == 1
    assert cert.evaluate(7).terms == DecoratedClass.fundamental(1, 1, 6).terms


def test_bernoulli_limit_genus_two():
    limit = r0_limit_class(2, (2,), method="bernoulli")
    assert named_coefficients(limit) == genus2_table_limit((2,))
    assert named_coefficients(eliminate_kappa1(limit)) == {
        "psi1": 3,
        "delta_sep": Fraction(-6, 5),
        "delta_nonsep": Fraction(-1, 10),
    }


def test_limit_preconditions():
    with pytest.raises(PreconditionError, match="summing to 2g-2"):
        r0_limit_class(2, (1,))
    with pytest.raises(PreconditionError, match="below g - 1"):
        r0_limit_class(2, (2,), degree_cap=0)
    with pytest.raises(PreconditionError, match="window must start"):
        certify_polynomiality(2, (2,), r_window=(3, 10))


def test_window_too_small():
    with pytest.raises(PolynomialityError, match="window too small"):
        certify_polynomiality(1, (0,), r_window=(3, 4))
