from fractions import Fraction

import pytest

from rspin_cohft.errors import PreconditionError, UnstableError
from rspin_cohft.strata import (
    DecoratedClass,
    DecoratedGraph,
    StableGraph,
    automorphism_order,
    boundary_class,
    boundary_divisor,
    enumerate_stable_graphs,
    enumerate_weightings,
    kappa_class,
    kappa_exponential,
    kappa_polynomial,
    psi_class,
    pushforward_forget,
    pushforward_kappa,
)

LOOP_11 = StableGraph((0,), (0,), ((0, 0),))


@pytest.mark.parametrize(
    ("g", "n", "count"), [(0, 3, 1), (0, 4, 4), (0, 5, 26), (1, 1, 2), (1, 2, 5), (2, 0, 7)]
)
def test_stable_graph_counts(g, n, count):
    graphs = enumerate_stable_graphs(g, n)
    assert len(graphs) == count
    assert all(gr.is_stable() and gr.is_connected() and gr.genus == g for gr in graphs)


def test_max_edges():
    assert len(enumerate_stable_graphs(2, 0, max_edges=1)) == 3


def test_unstable():
    with pytest.raises(UnstableError, match="unstable"):
        enumerate_stable_graphs(0, 2)


@pytest.mark.parametrize(
    ("graph", "order"),
    [
        (LOOP_11, 2),
        (StableGraph((1, 1), (), ((0, 1),)), 2),
        (StableGraph((0, 0), (), ((0, 1), (0, 1), (0, 1))), 12),
        (StableGraph((0,), (), ((0, 0), (0, 0))), 8),
        (StableGraph((0, 0), (), ((0, 0), (0, 1), (1, 1))), 8),
        (StableGraph((1, 0), (1, 1), ((0, 1),)), 1),
    ],
)
def test_automorphisms(graph, order):
    assert automorphism_order(graph) == order


def test_canonical_ignores_vertex_order():
    one = StableGraph((0, 1), (0,), ((0, 1),))
    two = StableGraph((1, 0), (1,), ((1, 0),))
    assert one.canonical() == two.canonical()


def test_decorated_degree():
    graph = DecoratedGraph((1, 0), ((1,), ()), ((1, 2),), (((0, 1), (1, 0)),))
    assert graph.degree == 1 + 2 + 1 + 1
    assert not graph.is_principal()


def test_weighting_counts():
    for r in range(3, 8):
        assert len(list(enumerate_weightings(LOOP_11, r, [0]))) == r - 1
        assert len(list(enumerate_weightings(LOOP_11, r, [0], tqft_support=True))) == r - 1
        assert len(list(enumerate_weightings(LOOP_11, r, [1], tqft_support=True))) == 0


def test_weightings_balance_edges():
    graph = StableGraph((0, 0), (0, 1), ((0, 1), (0, 1)))
    for w in enumerate_weightings(graph, 5, [1, 1]):
        assert w.half_edges[0] + w.half_edges[1] == 3
        assert w.half_edges[2] + w.half_edges[3] == 3
    with pytest.raises(PreconditionError, match="out of range"):
        list(enumerate_weightings(graph, 5, [4, 1]))


def test_class_arithmetic():
    psi = psi_class(1, 1, 1)
    kappa = kappa_class(1, 1, (1,))
    total = psi + kappa.scale(2)
    assert total.coefficient(kappa.terms[0][0]) == 2
    assert (total - total).is_zero()
    assert total.degrees() == [1]
    assert (total + DecoratedClass.fundamental(1, 1)).principal_part().degree_part(0) == DecoratedClass.fundamental(1, 1)


def test_class_space_mismatch():
    with pytest.raises(PreconditionError, match="different spaces"):
        psi_class(1, 1, 1) + psi_class(1, 2, 1)


def test_json_round_trip():
    cls = psi_class(2, 2, 1).scale(Fraction(3, 7)) + boundary_divisor(2, 2, "alpha") + kappa_class(2, 2, (1, 1))
    assert DecoratedClass.from_json(cls.to_json()) == cls
    term = cls.to_json()["terms"][0]
    assert set(term) == {"vertices", "edges", "legs", "coeff"}


def test_pushforward_kappa():
    assert pushforward_kappa((1,), 1, 1) == (((1,), Fraction(1)),)
    assert pushforward_kappa((0,), 2, 1) == (((), Fraction(3)),)
    assert dict(pushforward_kappa((1, 1), 1, 1)) == {(1, 1): 1, (2,): 1}


def test_pushforward_forget():
    assert pushforward_forget(psi_class(1, 2, 2, 2), 1) == kappa_class(1, 1, (1,))
    assert pushforward_forget(psi_class(1, 2, 2, 1), 1) == DecoratedClass.fundamental(1, 1)
    assert pushforward_forget(DecoratedClass.fundamental(1, 2), 1).is_zero()


def test_kappa_polynomial():
    assert kappa_polynomial({1: Fraction(1)}, 2) == {(): 1, (1,): -1, (1, 1): Fraction(1, 2)}
    assert kappa_polynomial({1: Fraction(1)}, 0) == {(): 1}


def test_kappa_exponential():
    cls = kappa_exponential(1, 1, {1: Fraction(1, 2)}, 1)
    assert cls == DecoratedClass.fundamental(1, 1) - kappa_class(1, 1, (1,)).scale(Fraction(1, 2))


def test_boundary_divisors():
    delta = boundary_divisor(1, 1, "nonsep")
    assert delta.coefficient(LOOP_11.decorated()) == Fraction(1, 2)
    assert boundary_divisor(2, 1, "sep") == boundary_class(StableGraph((1, 1), (0,), ((0, 1),)))
    with pytest.raises(PreconditionError, match="no boundary divisor"):
        boundary_divisor(2, 1, "alpha")
