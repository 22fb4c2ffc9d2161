"""
The R-matrix action on the r-spin TQFT as an exact stable-graph sum.

Every stable graph contributes xi_Gamma* of a product of local factors, weighted
1/|Aut Gamma|:

* a leg i carries R^{-1}(psi_i) e_{a_i};
* an edge carries the bivector (eta^{-1} - R^{-1}(psi') eta^{-1} R^{-1}(psi'')^t) / (psi' + psi'');
* a vertex carries sum_k 1/k! p_{k*} omega(..., T(psi_{n+1}), ..., T(psi_{n+k})) with
  T(z) = -sum_{m>=1} z^{m+1} R^{-1}_m e_0, the kappa-legs pushed forward at once.

The vertex values are the TQFT at the requested shift point.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial

from rspin_cohft.data import Shift
from rspin_cohft.errors import EdgeDivisibilityError, PreconditionError, UnstableError
from rspin_cohft.frobenius import FrobeniusPoint, tqft_exact
from rspin_cohft.rmatrix import r_matrix_tau, r_matrix_tilde
from rspin_cohft.strata import (
    DecoratedClass,
    DecoratedGraph,
    Kappa,
    StableGraph,
    automorphism_order,
    enumerate_stable_graphs,
    pushforward_kappa,
)

log = logging.getLogger(__name__)

# (leg psi exponents at the vertex, kappa monomial) -> coefficient
VertexPoly = dict[tuple[tuple[int, ...], Kappa], Fraction]


@dataclass(frozen=True)
class EdgeTerm:
    b: int  # index inserted at the first half-edge
    c: int  # index inserted at the second half-edge
    i: int  # psi' exponent
    j: int  # psi'' exponent
    coeff: Fraction

    @property
    def degree(self) -> int:
        return self.i + self.j


class GiventalAction:
    def __init__(self, r: int, shift: Shift, order: int) -> None:
        self.point = FrobeniusPoint(r, shift)
        self.r = r
        self.order = order
        if shift is Shift.Last:
            _, rinv = r_matrix_tau(r, order)
        else:
            _, rinv = r_matrix_tilde(r, order)
        self.rinv = [rinv.coefficient(m) for m in range(order + 1)]
        self._tqft: dict[tuple[int, tuple[int, ...]], Fraction] = {}
        self._vertex: dict[tuple[int, tuple[int, ...], tuple[int, ...], int], VertexPoly] = {}
        self._edges: dict[int, tuple[EdgeTerm, ...]] = {}

    @property
    def dim(self) -> int:
        return self.r - 1

    def tqft(self, g: int, indices: tuple[int, ...]) -> Fraction:
        key = (g, tuple(sorted(indices)))
        if key not in self._tqft:
            self._tqft[key] = tqft_exact(self.point, g, key[1]).value
        return self._tqft[key]

    def _check_order(self, needed: int) -> None:
        if needed > self.order:
            msg = f"R-matrix truncated at {self.order}, need {needed}"
            raise PreconditionError(msg)

    def leg_terms(self, a: int, budget: int) -> list[tuple[int, int, Fraction]]:
        """(m, c, coeff): psi^m e_c with coeff the entry [c][a] of R^{-1}_m."""
        self._check_order(budget)
        return [
            (m, c, self.rinv[m][c][a])
            for m in range(budget + 1)
            for c in range(self.dim)
            if self.rinv[m][c][a]
        ]

    def kappa_leg_terms(self, budget: int) -> list[tuple[int, int, Fraction]]:
        """(m, d, coeff) of T(psi) = -sum_{m>=1} psi^{m+1} R^{-1}_m e_0, m counted as kappa degree."""
        self._check_order(budget)
        return [
            (m, d, -self.rinv[m][d][0])
            for m in range(1, budget + 1)
            for d in range(self.dim)
            if self.rinv[m][d][0]
        ]

    def edge_terms(self, budget: int) -> tuple[EdgeTerm, ...]:
        """Nonzero coefficients of the edge bivector up to total psi degree ``budget``."""
        if budget in self._edges:
            return self._edges[budget]
        self._check_order(budget + 1)
        r, dim = self.r, self.dim
        top = budget + 1
        terms = []
        for b, c in product(range(dim), repeat=2):
            numer: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
            if b + c == r - 2:
                numer[(0, 0)] += 1
            for i in range(top + 1):
                for j in range(top + 1 - i):
                    acc = Fraction(0)
                    for d in range(dim):
                        x = self.rinv[i][b][d]
                        if x:
                            acc += x * self.rinv[j][c][r - 2 - d]
                    if acc:
                        numer[(i, j)] -= acc
            quotient = _divide_by_sum(numer, top)
            if quotient is None:
                remainder = {k: v for k, v in numer.items() if v}
                msg = "edge factor not divisible by psi' + psi''"
                raise EdgeDivisibilityError(msg, edge=(b, c), remainder=remainder)
            for (i, j), coeff in quotient.items():
                if coeff and i + j <= budget:
                    terms.append(EdgeTerm(b, c, i, j, coeff))
        out = tuple(sorted(terms, key=lambda t: (t.degree, t.b, t.c, t.i)))
        self._edges[budget] = out
        log.debug(f"edge bivector r={r} {self.point.shift.value} budget {budget}: {len(out)} terms")
        return out

    def vertex_factor(
        self, g: int, leg_as: tuple[int, ...], half_idx: tuple[int, ...], budget: int
    ) -> VertexPoly:
        key = (g, leg_as, half_idx, budget)
        if key in self._vertex:
            return self._vertex[key]
        out: VertexPoly = defaultdict(Fraction)
        valence = len(leg_as) + len(half_idx)
        kappa_opts = self.kappa_leg_terms(budget) if budget > 0 else []
        for choice in product(*(self.leg_terms(a, budget) for a in leg_as)):
            leg_deg = sum(m for m, _, _ in choice)
            if leg_deg > budget:
                continue
            leg_coeff = Fraction(1)
            for _, _, co in choice:
                leg_coeff *= co
            leg_idx = tuple(c for _, c, _ in choice)
            exps = tuple(m for m, _, _ in choice)
            rest = budget - leg_deg
            for k in range(rest + 1):
                for kchoice in product(kappa_opts, repeat=k):
                    if sum(m for m, _, _ in kchoice) > rest:
                        continue
                    value = self.tqft(g, leg_idx + half_idx + tuple(d for _, d, _ in kchoice))
                    if not value:
                        continue
                    coeff = leg_coeff * value / factorial(k)
                    for _, _, co in kchoice:
                        coeff *= co
                    ms = tuple(sorted(m for m, _, _ in kchoice))
                    for mono, pc in pushforward_kappa(ms, g, valence):
                        out[(exps, mono)] += coeff * pc
        result = {k: v for k, v in out.items() if v}
        self._vertex[key] = result
        return result

    def graph_terms(
        self, graph: StableGraph, a: tuple[int, ...], degree_cap: int
    ) -> list[tuple[DecoratedGraph, Fraction]]:
        budget = degree_cap - graph.num_edges
        if budget < 0:
            return []
        aut = automorphism_order(graph)
        edge_opts = self.edge_terms(budget)
        legs_at = [graph.legs_at(v) for v in range(graph.num_vertices)]
        halves_at = [graph.half_edges_at(v) for v in range(graph.num_vertices)]
        out: list[tuple[DecoratedGraph, Fraction]] = []

        def assemble(choice: tuple[EdgeTerm, ...]) -> None:
            rest = budget - sum(t.degree for t in choice)
            index = {}
            psi = {}
            coeff = Fraction(1, aut)
            for e, t in enumerate(choice):
                index[2 * e], index[2 * e + 1] = t.b, t.c
                psi[2 * e], psi[2 * e + 1] = t.i, t.j
                coeff *= t.coeff
            # partial products over vertices: (leg exps per vertex, kappas per vertex, degree)
            partial: list[tuple[tuple[tuple[int, ...], ...], tuple[Kappa, ...], int, Fraction]] = [
                ((), (), 0, coeff)
            ]
            for v, g_v in enumerate(graph.genera):
                poly = self.vertex_factor(
                    g_v,
                    tuple(a[i] for i in legs_at[v]),
                    tuple(index[h] for h in halves_at[v]),
                    rest,
                )
                nxt = []
                for exps_acc, kap_acc, deg, co in partial:
                    for (exps, mono), val in poly.items():
                        d = deg + sum(exps) + sum(mono)
                        if d <= rest:
                            nxt.append(((*exps_acc, exps), (*kap_acc, mono), d, co * val))
                partial = nxt
                if not partial:
                    return
            for exps_all, kappas, _, co in partial:
                legs = [(0, 0)] * graph.n
                for v, exps in enumerate(exps_all):
                    for i, m in zip(legs_at[v], exps, strict=True):
                        legs[i] = (v, m)
                edges = tuple(
                    ((x, psi[2 * e]), (y, psi[2 * e + 1])) for e, (x, y) in enumerate(graph.edges)
                )
                out.append((DecoratedGraph(graph.genera, kappas, tuple(legs), edges), co))

        def walk(e: int, chosen: tuple[EdgeTerm, ...], used: int) -> None:
            if e == graph.num_edges:
                assemble(chosen)
                return
            for t in edge_opts:
                if used + t.degree > budget:
                    break
                walk(e + 1, (*chosen, t), used + t.degree)

        walk(0, (), 0)
        return out


def _divide_by_sum(
    numer: dict[tuple[int, int], Fraction], top: int
) -> dict[tuple[int, int], Fraction] | None:
    """Quotient of sum n_ij x^i y^j by (x + y) through total degree ``top``, or None on a remainder."""
    if numer.get((0, 0), 0):
        return None
    q: dict[tuple[int, int], Fraction] = {}
    for s in range(top):
        prev = Fraction(0)
        for i in range(s + 1):
            prev = numer.get((i, s - i + 1), Fraction(0)) - prev
            q[(i, s - i)] = prev
        if numer.get((s + 1, 0), Fraction(0)) != q[(s, 0)]:
            return None
    return q


def edge_numerator_vanishes(r: int, shift: Shift, order: int) -> bool:
    """True iff every edge numerator vanishes on psi'' = -psi' through degree ``order``."""
    engine = GiventalAction(r, shift, order)
    dim = r - 1
    for b, c in product(range(dim), repeat=2):
        for s in range(order + 1):
            total = Fraction(int(s == 0 and b + c == r - 2))
            for i in range(s + 1):
                acc = Fraction(0)
                for d in range(dim):
                    acc += engine.rinv[i][b][d] * engine.rinv[s - i][c][r - 2 - d]
                total -= acc * (-1) ** (s - i)
            if total:
                log.debug(f"edge numerator at (b, c) = ({b}, {c}) survives in degree {s}")
                return False
    return True


@lru_cache(maxsize=32)
def _engine(r: int, shift: Shift, order: int) -> GiventalAction:
    return GiventalAction(r, shift, order)


def givental_action(
    r: int, shift: Shift, g: int, a: list[int] | tuple[int, ...], degree_cap: int
) -> DecoratedClass:
    """Omega_{g,n}(e_{a_1} x ... x e_{a_n}) at the given shift, every degree up to ``degree_cap``."""
    n = len(a)
    if 2 * g - 2 + n <= 0 or g < 0:
        msg = f"unstable (g, n) = ({g}, {n})"
        raise UnstableError(msg)
    bad = [x for x in a if not 0 <= x <= r - 2]
    if bad:
        msg = f"insertions {bad} out of range 0..{r - 2}"
        raise PreconditionError(msg)
    if not 0 <= degree_cap <= 3 * g - 3 + n:
        msg = f"degree cap {degree_cap} outside 0..{3 * g - 3 + n}"
        raise PreconditionError(msg)
    engine = _engine(r, shift, degree_cap + 1)
    items: list[tuple[DecoratedGraph, Fraction]] = []
    graphs = enumerate_stable_graphs(g, n, degree_cap)
    for graph in graphs:
        items.extend(engine.graph_terms(graph, tuple(a), degree_cap))
    result = DecoratedClass.from_terms(g, n, items, degree_cap)
    log.info(
        f"Omega r={r} {shift.value} (g, n)=({g}, {n}) a={list(a)}: "
        f"{len(graphs)} graphs, {len(result)} terms up to degree {degree_cap}"
    )
    return result
