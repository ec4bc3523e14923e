"""Divisors on graphs: q-reduction, Baker-Norine rank and h0 in dimension one.

A graph here is a one-dimensional :class:`WeakTropicalComplex`; its ridges
are its vertices and multiple edges are allowed. Principal divisors are
``div(phi) = -L phi`` with ``L`` the graph Laplacian.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import comb, lcm
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from . import errors
from .complex_core import DeltaComplex, Simplex, WeakTropicalComplex, build_complex
from .divisors import PLFunction, RationalPoint, RidgeDivisor, div_pl
from .exact_linalg import smith_normal_form


def _graph(G) -> WeakTropicalComplex:
    if isinstance(G, DeltaComplex):
        G = WeakTropicalComplex(G, {})
    if G.n != 1:
        raise errors.WrongDimension(f"expected a graph (n = 1), got n = {G.n}")
    return G


@dataclass
class GraphDivisor:
    """Integer chips on the vertices of a graph."""

    graph: WeakTropicalComplex
    chips: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self.graph = _graph(self.graph)
        known = set(self.graph.complex.vertex_ids)
        clean = {}
        for v, a in self.chips.items():
            if v not in known:
                raise errors.UnknownRidgeId(f"unknown vertex {v!r}")
            if isinstance(a, Fraction):
                if a.denominator != 1:
                    raise errors.NonIntegralDivisor(f"chip count {a} at {v} is not an integer")
                a = int(a)
            if a:
                clean[v] = int(a)
        self.chips = clean

    @classmethod
    def coerce(cls, G, D) -> "GraphDivisor":
        if isinstance(D, GraphDivisor):
            return D
        if isinstance(D, RidgeDivisor):
            if not D.is_integral():
                raise errors.NonIntegralDivisor("graph divisors must be integral")
            return cls(D.host, dict(D.coeffs))
        return cls(G, dict(D))

    def __getitem__(self, v):
        return self.chips.get(v, 0)

    def __sub__(self, other):
        out = dict(self.chips)
        for v, a in other.chips.items():
            out[v] = out.get(v, 0) - a
        return GraphDivisor(self.graph, out)

    def __add__(self, other):
        out = dict(self.chips)
        for v, a in other.chips.items():
            out[v] = out.get(v, 0) + a
        return GraphDivisor(self.graph, out)

    def __eq__(self, other):
        return isinstance(other, GraphDivisor) and self.graph is other.graph and self.chips == other.chips

    @property
    def degree(self) -> int:
        return sum(self.chips.values())

    def vector(self) -> List[int]:
        return [self[v] for v in self.graph.complex.vertex_ids]

    def is_effective(self) -> bool:
        return all(a >= 0 for a in self.chips.values())

    def to_ridge_divisor(self) -> RidgeDivisor:
        return RidgeDivisor(self.graph, dict(self.chips))

    def __repr__(self):
        return f"GraphDivisor({self.chips})"


def graph_from_edges(edges: Sequence[Tuple[str, str]], vertices: Sequence[str] = ()) -> WeakTropicalComplex:
    """Multigraph with edges named ``e0, e1, ...`` in input order."""
    names = list(vertices)
    for u, v in edges:
        if u == v:
            raise errors.NonRegular(f"loop at {u!r}")
        for x in (u, v):
            if x not in names:
                names.append(x)
    recs = [Simplex(v, 0, ()) for v in names]
    recs += [Simplex(f"e{i}", 1, (v, u)) for i, (u, v) in enumerate(edges)]
    return WeakTropicalComplex(build_complex(1, recs), {})


def adjacency(G) -> Tuple[List[str], List[List[int]]]:
    """Vertex order and edge-multiplicity matrix."""
    G = _graph(G)
    cx = G.complex
    verts = list(cx.vertex_ids)
    idx = {v: i for i, v in enumerate(verts)}
    A = [[0] * len(verts) for _ in verts]
    for e in cx.facets:
        u, w = cx.vertices(e)
        A[idx[u]][idx[w]] += 1
        A[idx[w]][idx[u]] += 1
    return verts, A


def laplacian(G) -> List[List[int]]:
    _, A = adjacency(G)
    return [[(sum(row) if i == j else -row[j]) for j in range(len(row))] for i, row in enumerate(A)]


# -- Dhar burning / q-reduction ------------------------------------------------


def _burn(A, d, q):
    """Vertices left unburnt by a fire started at ``q`` (Dhar's algorithm)."""
    n = len(d)
    burnt = [False] * n
    burnt[q] = True
    heat = [0] * n
    stack = [q]
    while stack:
        u = stack.pop()
        for v in range(n):
            if A[u][v] and not burnt[v]:
                heat[v] += A[u][v]
                if heat[v] > d[v]:
                    burnt[v] = True
                    stack.append(v)
    return [v for v in range(n) if not burnt[v]]


def _fire(A, d, z, S):
    inside = set(S)
    for u in S:
        z[u] += 1
        for v in range(len(d)):
            if A[u][v] and v not in inside:
                d[u] -= A[u][v]
                d[v] += A[u][v]


def _reduce(A, d, q):
    """q-reduce the chip vector ``d`` in place; returns the firing vector."""
    n = len(d)
    z = [0] * n
    # layers by distance from q
    dist = [-1] * n
    dist[q] = 0
    frontier = [q]
    while frontier:
        nxt = []
        for u in frontier:
            for v in range(n):
                if A[u][v] and dist[v] < 0:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    if min(dist) < 0:
        raise errors.Disconnected("graph is not connected")
    # push debt towards q: firing the ball of radius k only feeds layer k + 1
    top = max(dist)
    for k in range(top - 1, -1, -1):
        ball = [v for v in range(n) if dist[v] <= k]
        shell = [v for v in range(n) if dist[v] == k + 1]
        while any(d[v] < 0 for v in shell):
            _fire(A, d, z, ball)
    while True:
        S = _burn(A, d, q)
        if not S:
            return z
        _fire(A, d, z, S)


@dataclass
class QReduction:
    """``reduced = D + div(phi)`` where ``reduced`` is q-reduced."""

    D: GraphDivisor
    q: str
    reduced: GraphDivisor
    phi: PLFunction

    def verify(self) -> bool:
        G = self.D.graph
        lhs = (self.D.to_ridge_divisor() + div_pl(G, self.phi)).coeffs
        if {v: a for v, a in lhs.items() if a} != self.reduced.chips:
            return False
        return is_q_reduced(G, self.reduced, self.q)


def is_q_reduced(G, D, q: str) -> bool:
    G = _graph(G)
    D = GraphDivisor.coerce(G, D)
    verts, A = adjacency(G)
    d = D.vector()
    qi = verts.index(q)
    if any(a < 0 for i, a in enumerate(d) if i != qi):
        return False
    return not _burn(A, d, qi)


def q_reduce(G, D, q: str) -> QReduction:
    """The q-reduced divisor linearly equivalent to ``D``, with the PL
    function realizing the equivalence."""
    G = _graph(G)
    D = GraphDivisor.coerce(G, D)
    verts, A = adjacency(G)
    if q not in verts:
        raise errors.UnknownRidgeId(f"unknown vertex {q!r}")
    d = D.vector()
    z = _reduce(A, d, verts.index(q))
    reduced = GraphDivisor(G, dict(zip(verts, d)))
    # firing a set S subtracts L 1_S, i.e. adds div(1_S)
    phi = PLFunction(G, dict(zip(verts, z)))
    return QReduction(D, q, reduced, phi)


def equivalent_to_effective(G, D, q: str | None = None) -> bool:
    G = _graph(G)
    D = GraphDivisor.coerce(G, D)
    if D.degree < 0:
        return False
    q = q or G.complex.vertex_ids[0]
    return q_reduce(G, D, q).reduced[q] >= 0


# -- rank ------------------------------------------------------------------------


@dataclass
class RankResult:
    """Baker-Norine rank together with an effective divisor ``witness`` of
    degree ``rank + 1`` such that ``D - witness`` is not equivalent to an
    effective divisor."""

    D: GraphDivisor
    rank: int
    witness: GraphDivisor

    def verify(self) -> bool:
        E = self.witness
        return (
            E.is_effective()
            and E.degree == self.rank + 1
            and not equivalent_to_effective(self.D.graph, self.D - E)
        )


class _RankSolver:
    """Memoized r(D) = 1 + min_v r(D - v) over q-reduced representatives."""

    def __init__(self, G):
        self.G = G
        self.verts, self.A = adjacency(G)
        self.memo: Dict[Tuple[int, ...], Tuple[int, Tuple[int, ...]]] = {}

    def canonical(self, d):
        d = list(d)
        _reduce(self.A, d, 0)
        return tuple(d)

    def solve(self, d) -> Tuple[int, Tuple[int, ...]]:
        """Rank of ``d`` and a witness as a tuple of vertex indices."""
        if sum(d) < 0:
            return -1, ()
        c = self.canonical(d)
        if c in self.memo:
            return self.memo[c]
        if c[0] < 0:
            out = (-1, ())
        else:
            best = None
            for v in range(len(c)):
                e = list(c)
                e[v] -= 1
                r, w = self.solve(e)
                if best is None or r < best[0]:
                    best = (r, (v,) + w)
                if r == -1:
                    break
            out = (best[0] + 1, best[1])
        self.memo[c] = out
        return out


def rank(G, D) -> RankResult:
    """Baker-Norine rank of ``D`` on the graph ``G``."""
    G = _graph(G)
    D = GraphDivisor.coerce(G, D)
    solver = _RankSolver(G)
    r, w = solver.solve(D.vector())
    chips: Dict[str, int] = {}
    for i in w:
        v = solver.verts[i]
        chips[v] = chips.get(v, 0) + 1
    return RankResult(D, r, GraphDivisor(G, chips))


def rank_by_enumeration(G, D) -> int:
    """Rank straight from the definition, by enumerating every effective E.

    Exponential; intended as a test oracle for small inputs.
    """
    G = _graph(G)
    D = GraphDivisor.coerce(G, D)
    verts = G.complex.vertex_ids
    if not equivalent_to_effective(G, D):
        return -1
    k = 0
    while True:
        for E in combinations_with_replacement(verts, k + 1):
            chips = {}
            for v in E:
                chips[v] = chips.get(v, 0) + 1
            if not equivalent_to_effective(G, D - GraphDivisor(G, chips)):
                return k
        k += 1


def canonical_graph_divisor(G) -> GraphDivisor:
    G = _graph(G)
    cx = G.complex
    return GraphDivisor(G, {v: cx.degree(v) - 2 for v in cx.vertex_ids})


def genus(G) -> int:
    cx = _graph(G).complex
    return len(cx.facets) - len(cx.vertex_ids) + 1


# -- h0 ------------------------------------------------------------------------------

INFINITY = float("inf")


def _point_of_vertex(G, v: str) -> RationalPoint:
    return RationalPoint(v, (Fraction(1),))


def h0_dim1(G, D, points: Sequence = ()) -> int:
    """h0 of ``D + sum(points)`` on the graph ``G``, as ``rank + 1``.

    ``points`` are extra chips at rational points of ``G``: each entry is a
    :class:`RationalPoint` (one chip) or a ``(RationalPoint, count)`` pair.
    The graph is subdivided until every point is a vertex.
    """
    G = _graph(G)
    if not G.complex.facets:
        raise errors.SinglePointComplex("h0 is not defined on a single point")
    D = GraphDivisor.coerce(G, D)
    if not points:
        return rank(G, D).rank + 1
    from .subdivision import promote_points

    pts, counts = [], []
    for entry in points:
        if isinstance(entry, RationalPoint):
            pts.append(entry)
            counts.append(1)
        else:
            pts.append(entry[0])
            counts.append(int(entry[1]))
    base = [_point_of_vertex(G, v) for v in D.chips]
    m, Gm, ids = promote_points(G, base + pts)
    chips: Dict[str, int] = {}
    for v, a in zip(ids, list(D.chips.values()) + counts):
        chips[v] = chips.get(v, 0) + a
    return rank(Gm, GraphDivisor(Gm, chips)).rank + 1


@dataclass
class DirectH0:
    """Result of the point-set search over the vertices of an order-``s``
    subdivision: ``value`` points (``witness``) that no effective divisor
    equivalent to ``D`` contains."""

    value: int
    witness: Tuple[str, ...]
    order: int
    graph: WeakTropicalComplex


def _class_keys(L):
    """Per-vertex class vectors in the torsion part of coker(L)."""
    snf = smith_normal_form(L)
    diag = snf.diagonal
    rows = [(i, d) for i, d in enumerate(diag) if d > 1]
    n = len(L)
    keys = np.zeros((n, len(rows)), dtype=np.int64)
    mods = np.array([d for _, d in rows], dtype=np.int64)
    for c, (i, d) in enumerate(rows):
        for v in range(n):
            keys[v, c] = snf.U[i][v] % d
    return keys, mods


def h0_direct(G, D, order: int | None = None) -> DirectH0:
    """h0 straight from its definition, restricted to the rational points that
    are vertices of the order-``order`` subdivision.

    Linear equivalence is decided through the Smith form of the Laplacian, so
    the search does not share code with :func:`rank`. Restricting the points
    can only raise the minimum, so the value is an upper bound on h0 that is
    attained once the subdivision is fine enough. The default order is
    ``max(1, deg D)``.
    """
    from .subdivision import subdivide

    G = _graph(G)
    if not G.complex.facets:
        raise errors.SinglePointComplex("h0 is not defined on a single point")
    D = GraphDivisor.coerce(G, D)
    deg = D.degree
    s = order or max(1, deg)
    if deg < 0:
        return DirectH0(0, (), s, G)
    Gs, smap = subdivide(G, s)
    verts = list(Gs.complex.vertex_ids)
    N = len(verts)
    lift = {v: smap.by_key[(v, ((s,),))] for v in D.chips}
    target = [0] * N
    for v, a in D.chips.items():
        target[verts.index(lift[v])] += a
    keys, mods = _class_keys(laplacian(Gs))
    goal = (np.array(target, dtype=np.int64) @ keys) % mods if len(mods) else np.zeros(0, dtype=np.int64)

    supports = set()
    if deg == 0:
        if not len(mods) or not goal.any():
            supports.add(())
    else:
        combos = np.array(list(combinations_with_replacement(range(N), deg)), dtype=np.int64)
        cls = keys[combos].sum(axis=1) % mods if len(mods) else np.zeros((len(combos), 0), dtype=np.int64)
        hit = np.all(cls == goal, axis=1)
        for row in combos[hit]:
            supports.add(tuple(sorted(set(row.tolist()))))
    if not supports:
        return DirectH0(0, (), s, Gs)
    for k in range(1, N + 1):
        covered = set()
        for sup in supports:
            covered.update(combinations(sup, k))
        if len(covered) < comb(N, k):
            for P in combinations(range(N), k):
                if P not in covered:
                    return DirectH0(k, tuple(verts[i] for i in P), s, Gs)
    return DirectH0(INFINITY, (), s, Gs)
