"""
Desk-scale strata algebra.

A ``StableGraph`` is the dual graph of a nodal curve: vertex genera, the vertex
of every marked leg, and edges as vertex pairs. A ``DecoratedGraph`` adds psi
powers on legs and half-edges and a kappa monomial on every vertex. A
``DecoratedClass`` is an exact linear combination of decorated graphs; the
coefficient of a term multiplies the boundary pushforward xi_Gamma* of its
decorations, with no automorphism factor folded in.
"""

import logging
from collections import defaultdict
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from math import factorial
from typing import Any

import networkx as nx
from networkx.algorithms import isomorphism
from sympy import QQ, ring
from sympy.utilities.iterables import multiset_partitions

from rspin_cohft.algebra_core import Series, parse_rational, rational_str
from rspin_cohft.errors import PreconditionError, UnstableError

log = logging.getLogger(__name__)

HalfEdge = tuple[int, int]  # (vertex, psi exponent)
Kappa = tuple[int, ...]  # sorted kappa indices, (1, 1, 2) is kappa_1^2 kappa_2


@dataclass(frozen=True, order=True)
class StableGraph:
    genera: tuple[int, ...]
    legs: tuple[int, ...]  # legs[i] is the vertex carrying marker i + 1
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def principal(cls, g: int, n: int) -> "StableGraph":
        return cls((g,), (0,) * n, ())

    @property
    def n(self) -> int:
        return len(self.legs)

    @property
    def num_vertices(self) -> int:
        return len(self.genera)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def h1(self) -> int:
        return self.num_edges - self.num_vertices + 1

    @property
    def genus(self) -> int:
        return sum(self.genera) + self.h1

    def valence(self, v: int) -> int:
        ends = sum((x == v) + (y == v) for x, y in self.edges)
        return ends + sum(1 for w in self.legs if w == v)

    def half_edges_at(self, v: int) -> list[int]:
        """Half-edge ids 2e (first end) and 2e + 1 (second end) sitting at v."""
        out = []
        for e, (x, y) in enumerate(self.edges):
            if x == v:
                out.append(2 * e)
            if y == v:
                out.append(2 * e + 1)
        return out

    def half_edge_vertex(self, h: int) -> int:
        return self.edges[h // 2][h % 2]

    def legs_at(self, v: int) -> list[int]:
        return [i for i, w in enumerate(self.legs) if w == v]

    def is_stable(self) -> bool:
        return all(2 * g - 2 + self.valence(v) > 0 for v, g in enumerate(self.genera))

    def to_nx(self) -> nx.Graph:
        graph = nx.Graph()
        for v, g in enumerate(self.genera):
            graph.add_node(
                v,
                genus=g,
                legs=frozenset(self.legs_at(v)),
                loops=sum(1 for x, y in self.edges if x == y == v),
            )
        for x, y in self.edges:
            if x == y:
                continue
            if graph.has_edge(x, y):
                graph[x][y]["mult"] += 1
            else:
                graph.add_edge(x, y, mult=1)
        return graph

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_nx())

    def decorated(self) -> "DecoratedGraph":
        return DecoratedGraph(
            self.genera,
            ((),) * self.num_vertices,
            tuple((v, 0) for v in self.legs),
            tuple(((x, 0), (y, 0)) for x, y in self.edges),
        )

    def canonical(self) -> "StableGraph":
        return self.decorated().canonical().graph


@dataclass(frozen=True, order=True)
class DecoratedGraph:
    genera: tuple[int, ...]
    kappa: tuple[Kappa, ...]
    legs: tuple[HalfEdge, ...]
    edges: tuple[tuple[HalfEdge, HalfEdge], ...]

    @property
    def graph(self) -> StableGraph:
        return StableGraph(
            self.genera,
            tuple(v for v, _ in self.legs),
            tuple((h[0], k[0]) for h, k in self.edges),
        )

    @property
    def degree(self) -> int:
        psi = sum(p for _, p in self.legs) + sum(h[1] + k[1] for h, k in self.edges)
        return len(self.edges) + psi + sum(sum(k) for k in self.kappa)

    def is_principal(self) -> bool:
        return len(self.genera) == 1 and not self.edges

    def sort_key(self) -> tuple[Any, ...]:
        return (self.degree, len(self.edges), len(self.genera), self)

    def _invariant(self, v: int) -> tuple[Any, ...]:
        legs = tuple(sorted((i, p) for i, (w, p) in enumerate(self.legs) if w == v))
        loops = tuple(sorted(tuple(sorted((h[1], k[1]))) for h, k in self.edges if h[0] == k[0] == v))
        ends = tuple(
            sorted(
                [h[1] for h, k in self.edges if h[0] == v and k[0] != v]
                + [k[1] for h, k in self.edges if k[0] == v and h[0] != v]
            )
        )
        return (self.genera[v], self.kappa[v], legs, loops, ends)

    def relabel(self, new: Mapping[int, int] | tuple[int, ...]) -> "DecoratedGraph":
        size = len(self.genera)
        genera = [0] * size
        kappa: list[Kappa] = [()] * size
        for v in range(size):
            genera[new[v]] = self.genera[v]
            kappa[new[v]] = self.kappa[v]
        legs = tuple((new[v], p) for v, p in self.legs)
        edges = tuple(
            sorted(
                tuple(sorted(((new[h[0]], h[1]), (new[k[0]], k[1])))) for h, k in self.edges
            )
        )
        return DecoratedGraph(tuple(genera), tuple(kappa), legs, edges)  # type: ignore[arg-type]

    def canonical(self) -> "DecoratedGraph":
        return _canonical_cached(self)

    def to_json(self) -> dict[str, Any]:
        return {
            "vertices": [
                {"genus": g, "kappa": _kappa_to_json(k)} for g, k in zip(self.genera, self.kappa, strict=True)
            ],
            "edges": [[{"v": h[0], "psi": h[1]}, {"v": k[0], "psi": k[1]}] for h, k in self.edges],
            "legs": [{"marker": i + 1, "v": v, "psi": p} for i, (v, p) in enumerate(self.legs)],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "DecoratedGraph":
        genera = tuple(int(v["genus"]) for v in data["vertices"])
        kappa = tuple(_kappa_from_json(v.get("kappa", {})) for v in data["vertices"])
        legs_sorted = sorted(data["legs"], key=lambda leg: leg["marker"])
        legs = tuple((int(leg["v"]), int(leg["psi"])) for leg in legs_sorted)
        edges = tuple(
            ((int(h["v"]), int(h["psi"])), (int(k["v"]), int(k["psi"]))) for h, k in data["edges"]
        )
        return cls(genera, kappa, legs, edges)


def _kappa_to_json(kappa: Kappa) -> dict[str, int]:
    out: dict[str, int] = {}
    for m in kappa:
        out[str(m)] = out.get(str(m), 0) + 1
    return out


def _kappa_from_json(data: Mapping[str, int]) -> Kappa:
    return tuple(sorted(int(m) for m, e in data.items() for _ in range(int(e))))


def _best_relabeling(
    size: int,
    invariant: Callable[[int], Any],
    key: Callable[[tuple[int, ...]], Any],
) -> tuple[int, ...]:
    """Relabeling old -> new minimizing ``key`` among those sorting vertices by invariant."""
    order = sorted(range(size), key=invariant)
    blocks: list[list[int]] = []
    for v in order:
        if blocks and invariant(blocks[-1][0]) == invariant(v):
            blocks[-1].append(v)
        else:
            blocks.append([v])
    best: tuple[int, ...] | None = None
    best_key = None
    for choice in product(*(permutations(block) for block in blocks)):
        new = [0] * size
        label = 0
        for block in choice:
            for v in block:
                new[v] = label
                label += 1
        candidate = tuple(new)
        candidate_key = key(candidate)
        if best_key is None or candidate_key < best_key:
            best, best_key = candidate, candidate_key
    assert best is not None
    return best


@lru_cache(maxsize=200_000)
def _canonical_cached(graph: DecoratedGraph) -> DecoratedGraph:
    mapping = _best_relabeling(len(graph.genera), graph._invariant, graph.relabel)
    return graph.relabel(mapping)


def automorphism_order(graph: StableGraph) -> int:
    """|Aut|: vertex symmetries times parallel-edge and loop symmetries."""
    G = graph.to_nx()
    matcher = isomorphism.GraphMatcher(
        G, G, node_match=lambda x, y: x == y, edge_match=lambda x, y: x == y
    )
    vertex_isos = sum(1 for _ in matcher.isomorphisms_iter())
    out = vertex_isos
    for _, _, data in G.edges(data=True):
        out *= factorial(data["mult"])
    for _, data in G.nodes(data=True):
        out *= factorial(data["loops"]) * 2 ** data["loops"]
    return out


def _check_stable(g: int, n: int) -> None:
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        msg = f"unstable (g, n) = ({g}, {n})"
        raise UnstableError(msg)


def _degenerations(graph: StableGraph) -> Iterator[StableGraph]:
    """All graphs with one more edge that contract back to ``graph``."""
    for v, g_v in enumerate(graph.genera):
        if g_v >= 1:
            genera = list(graph.genera)
            genera[v] -= 1
            yield StableGraph(tuple(genera), graph.legs, (*graph.edges, (v, v)))

        legs = graph.legs_at(v)
        halves = graph.half_edges_at(v)
        items = [("leg", i) for i in legs] + [("half", h) for h in halves]
        new_v = graph.num_vertices
        for sides in product((0, 1), repeat=len(items)):
            count = [sides.count(0), sides.count(1)]
            for g1 in range(g_v + 1):
                g2 = g_v - g1
                if 2 * g1 - 2 + count[0] + 1 <= 0 or 2 * g2 - 2 + count[1] + 1 <= 0:
                    continue
                new_legs = list(graph.legs)
                ends = [list(e) for e in graph.edges]
                for (kind, idx), side in zip(items, sides, strict=True):
                    if side == 0:
                        continue
                    if kind == "leg":
                        new_legs[idx] = new_v
                    else:
                        ends[idx // 2][idx % 2] = new_v
                genera = (*graph.genera[:v], g1, *graph.genera[v + 1 :], g2)
                yield StableGraph(
                    genera, tuple(new_legs), (*(tuple(e) for e in ends), (v, new_v))  # type: ignore[arg-type]
                )


@lru_cache(maxsize=None)
def _stable_graphs(g: int, n: int, max_edges: int) -> tuple[StableGraph, ...]:
    level = {StableGraph.principal(g, n).canonical()}
    found = set(level)
    for _ in range(max_edges):
        nxt = set()
        for graph in level:
            for child in _degenerations(graph):
                canon = child.canonical()
                if canon not in found:
                    nxt.add(canon)
        if not nxt:
            break
        found |= nxt
        level = nxt
    graphs = sorted(found, key=lambda gr: (gr.num_edges, gr.num_vertices, gr))
    log.debug(f"{len(graphs)} stable graphs for (g, n) = ({g}, {n}), at most {max_edges} edges")
    return tuple(graphs)


def enumerate_stable_graphs(g: int, n: int, max_edges: int | None = None) -> list[StableGraph]:
    _check_stable(g, n)
    cap = 3 * g - 3 + n
    if max_edges is not None:
        cap = min(cap, max_edges)
    return list(_stable_graphs(g, n, max(cap, 0)))


@dataclass(frozen=True)
class Weighting:
    half_edges: tuple[int, ...]  # weight of half-edge 2e and 2e + 1
    legs: tuple[int, ...]


def enumerate_weightings(
    graph: StableGraph, r: int, a: list[int] | tuple[int, ...], *, tqft_support: bool = False
) -> Iterator[Weighting]:
    """
    Half-edge weights in 0..r-2 summing to r-2 across every edge, legs carrying
    a_i (legs past len(a) are kappa-legs with weight 0). With ``tqft_support``
    only weightings with g_v - 1 - (sum of weights at v) = 0 mod r-1 at every
    vertex are produced.
    """
    if len(a) > graph.n:
        msg = f"{len(a)} leg weights for a graph with {graph.n} legs"
        raise PreconditionError(msg)
    bad = [x for x in a if not 0 <= x <= r - 2]
    if bad:
        msg = f"leg weights {bad} out of range 0..{r - 2}"
        raise PreconditionError(msg)
    legs = tuple(a) + (0,) * (graph.n - len(a))
    for first in product(range(r - 1), repeat=graph.num_edges):
        halves = tuple(w for x in first for w in (x, r - 2 - x))
        if tqft_support:
            ok = True
            for v, g_v in enumerate(graph.genera):
                total = sum(halves[h] for h in graph.half_edges_at(v))
                total += sum(legs[i] for i in graph.legs_at(v))
                if (g_v - 1 - total) % (r - 1):
                    ok = False
                    break
            if not ok:
                continue
        yield Weighting(halves, legs)


@dataclass(frozen=True)
class DecoratedClass:
    g: int
    n: int
    terms: tuple[tuple[DecoratedGraph, Fraction], ...]
    degree_cap: int | None = None

    @classmethod
    def from_terms(
        cls,
        g: int,
        n: int,
        items: Iterable[tuple[DecoratedGraph, Fraction | int]],
        degree_cap: int | None = None,
    ) -> "DecoratedClass":
        acc: dict[DecoratedGraph, Fraction] = defaultdict(Fraction)
        for graph, coeff in items:
            if coeff == 0:
                continue
            if degree_cap is not None and graph.degree > degree_cap:
                continue
            acc[graph.canonical()] += Fraction(coeff)
        terms = tuple(
            sorted(((gr, c) for gr, c in acc.items() if c != 0), key=lambda t: t[0].sort_key())
        )
        return cls(g, n, terms, degree_cap)

    @classmethod
    def zero(cls, g: int, n: int) -> "DecoratedClass":
        return cls(g, n, ())

    @classmethod
    def fundamental(cls, g: int, n: int, coeff: Fraction | int = 1) -> "DecoratedClass":
        return cls.from_terms(g, n, [(StableGraph.principal(g, n).decorated(), coeff)])

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[DecoratedGraph, Fraction]]:
        return iter(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _check_space(self, other: "DecoratedClass") -> None:
        if (self.g, self.n) != (other.g, other.n):
            msg = f"classes live on different spaces: ({self.g},{self.n}) vs ({other.g},{other.n})"
            raise PreconditionError(msg)

    def __add__(self, other: "DecoratedClass") -> "DecoratedClass":
        self._check_space(other)
        cap = None if self.degree_cap is None or other.degree_cap is None else max(self.degree_cap, other.degree_cap)
        return DecoratedClass.from_terms(self.g, self.n, [*self.terms, *other.terms], cap)

    def scale(self, c: Fraction | int) -> "DecoratedClass":
        return DecoratedClass.from_terms(
            self.g, self.n, [(gr, co * c) for gr, co in self.terms], self.degree_cap
        )

    def __neg__(self) -> "DecoratedClass":
        return self.scale(-1)

    def __sub__(self, other: "DecoratedClass") -> "DecoratedClass":
        return self + (-other)

    def degree_part(self, d: int) -> "DecoratedClass":
        return DecoratedClass(self.g, self.n, tuple(t for t in self.terms if t[0].degree == d), self.degree_cap)

    def degrees(self) -> list[int]:
        return sorted({gr.degree for gr, _ in self.terms})

    def principal_part(self) -> "DecoratedClass":
        return DecoratedClass(self.g, self.n, tuple(t for t in self.terms if t[0].is_principal()), self.degree_cap)

    def coefficient(self, graph: DecoratedGraph) -> Fraction:
        canon = graph.canonical()
        for gr, c in self.terms:
            if gr == canon:
                return c
        return Fraction(0)

    def to_json(self) -> dict[str, Any]:
        return {
            "g": self.g,
            "n": self.n,
            "degree_cap": self.degree_cap,
            "terms": [{**gr.to_json(), "coeff": rational_str(c)} for gr, c in self.terms],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "DecoratedClass":
        items = [(DecoratedGraph.from_json(t), parse_rational(t["coeff"])) for t in data["terms"]]
        return cls.from_terms(int(data["g"]), int(data["n"]), items, data.get("degree_cap"))


@lru_cache(maxsize=None)
def pushforward_kappa(exponents: tuple[int, ...], genus: int, valence: int) -> tuple[tuple[Kappa, Fraction], ...]:
    """
    p_*(prod_j psi_{n+j}^{b_j + 1}) over the forgotten points, as kappa
    monomials: a sum over set partitions of the points, each block B weighted
    by (|B|-1)! and giving kappa of the sum of its b_j. kappa_0 is the scalar
    2g - 2 + valence of the target vertex.
    """
    k = len(exponents)
    if k == 0:
        return (((), Fraction(1)),)
    acc: dict[Kappa, Fraction] = defaultdict(Fraction)
    for blocks in multiset_partitions(list(range(k))):
        coeff = Fraction(1)
        monomial = []
        for block in blocks:
            coeff *= factorial(len(block) - 1)
            total = sum(exponents[j] for j in block)
            if total == 0:
                coeff *= 2 * genus - 2 + valence
            else:
                monomial.append(total)
        acc[tuple(sorted(monomial))] += coeff
    return tuple(sorted((m, c) for m, c in acc.items() if c))


def pushforward_forget(cls: DecoratedClass, forget_count: int) -> DecoratedClass:
    """
    Forget the last ``forget_count`` markers. Only the psi powers on the
    forgotten legs are pushed forward; every other decoration is read as pulled
    back from the target. A forgotten leg without psi contributes zero.
    """
    n_new = cls.n - forget_count
    if forget_count < 0 or n_new < 0:
        msg = f"cannot forget {forget_count} of {cls.n} markers"
        raise PreconditionError(msg)
    _check_stable(cls.g, n_new)
    items: list[tuple[DecoratedGraph, Fraction]] = []
    for graph, coeff in cls.terms:
        forgotten = graph.legs[n_new:]
        if any(p == 0 for _, p in forgotten):
            continue
        kept = graph.legs[:n_new]
        base = graph.graph
        per_vertex = []
        for v, g_v in enumerate(graph.genera):
            exps = tuple(sorted(p - 1 for w, p in forgotten if w == v))
            valence = base.valence(v) - len(exps)
            if exps and 2 * g_v - 2 + valence <= 0:
                msg = f"forgetting markers destabilizes vertex {v} of genus {g_v}"
                raise PreconditionError(msg)
            per_vertex.append(pushforward_kappa(exps, g_v, valence))
        for choice in product(*per_vertex):
            c = coeff
            kappa = []
            for v, (mono, pc) in enumerate(choice):
                c *= pc
                kappa.append(tuple(sorted(graph.kappa[v] + mono)))
            items.append((DecoratedGraph(graph.genera, tuple(kappa), kept, graph.edges), c))
    return DecoratedClass.from_terms(cls.g, n_new, items, cls.degree_cap)


def kappa_polynomial(
    coefficients: Series | Mapping[int, Fraction], degree: int
) -> dict[Kappa, Fraction]:
    """exp(-sum_m c_m kappa_m) up to kappa degree ``degree`` as {monomial: coeff}."""
    if degree <= 0:
        return {(): Fraction(1)}
    if isinstance(coefficients, Series):
        coeffs = {m: coefficients.coeff(m) for m in range(1, degree + 1)}
    else:
        coeffs = {m: Fraction(c) for m, c in coefficients.items() if 1 <= m <= degree}
    K_RING, *gens = ring(",".join(f"k{m}" for m in range(1, degree + 1)), QQ)
    exponent = K_RING.zero
    for m, c in coeffs.items():
        exponent -= QQ(c.numerator, c.denominator) * gens[m - 1]
    total = K_RING.one
    power = K_RING.one
    for j in range(1, degree + 1):
        power = power * exponent
        total += power * QQ(1, factorial(j))
    out: dict[Kappa, Fraction] = {}
    for monom, c in total.terms():
        weight = sum((m + 1) * e for m, e in enumerate(monom))
        if weight <= degree:
            mono = tuple(m + 1 for m, e in enumerate(monom) for _ in range(e))
            out[mono] = Fraction(int(c.numerator), int(c.denominator))
    return out


def kappa_exponential(
    g: int, n: int, coefficients: Series | Mapping[int, Fraction], degree: int
) -> DecoratedClass:
    """exp(-sum c_m kappa_m) on the principal graph of M_{g,n}bar."""
    _check_stable(g, n)
    principal = StableGraph.principal(g, n).decorated()
    items = [
        (DecoratedGraph(principal.genera, (mono,), principal.legs, ()), c)
        for mono, c in kappa_polynomial(coefficients, degree).items()
    ]
    return DecoratedClass.from_terms(g, n, items)


def psi_class(g: int, n: int, marker: int, power: int = 1) -> DecoratedClass:
    legs = tuple((0, power if i == marker - 1 else 0) for i in range(n))
    return DecoratedClass.from_terms(g, n, [(DecoratedGraph((g,), ((),), legs, ()), 1)])


def kappa_class(g: int, n: int, monomial: Kappa) -> DecoratedClass:
    legs = tuple((0, 0) for _ in range(n))
    return DecoratedClass.from_terms(
        g, n, [(DecoratedGraph((g,), (tuple(sorted(monomial)),), legs, ()), 1)]
    )


def boundary_class(graph: StableGraph, coeff: Fraction | int = 1) -> DecoratedClass:
    """coeff * xi_Gamma*(1)."""
    return DecoratedClass.from_terms(graph.genus, graph.n, [(graph.decorated(), coeff)])


def boundary_divisor(g: int, n: int, name: str) -> DecoratedClass:
    """
    Named boundary divisors: ``nonsep`` (half the loop stratum) on any space,
    ``sep`` on M_{2,1}bar, ``alpha``, ``beta``, ``gamma`` on M_{2,2}bar.
    On M_{1,1}bar ``nonsep`` is the boundary point class delta.
    """
    if name == "nonsep":
        graph = StableGraph((g - 1,), (0,) * n, ((0, 0),))
        return boundary_class(graph, Fraction(1, 2))
    table: dict[tuple[int, int, str], StableGraph] = {
        (2, 1, "sep"): StableGraph((1, 1), (0,), ((0, 1),)),
        (2, 2, "alpha"): StableGraph((2, 0), (1, 1), ((0, 1),)),
        (2, 2, "beta"): StableGraph((1, 1), (0, 1), ((0, 1),)),
        (2, 2, "gamma"): StableGraph((1, 1), (0, 0), ((0, 1),)),
    }
    try:
        graph = table[(g, n, name)]
    except KeyError as ex:
        msg = f"no boundary divisor named {name!r} on M_{{{g},{n}}}bar"
        raise PreconditionError(msg) from ex
    return boundary_class(graph, 1)
