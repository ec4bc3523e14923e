"""Regular Delta-complexes and weak tropical complexes.

A simplex is stored by id together with its ordered list of codimension-one
faces; face ``i`` is the face opposite vertex ``i``. Vertex tuples, coface
indices and face lookups are derived once at construction.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import errors
from .exact_linalg import charpoly, sign_variations


@dataclass(frozen=True)
class Simplex:
    id: str
    dim: int
    faces: Tuple[str, ...] = ()


class DeltaComplex:
    """A connected, finite, regular Delta-complex of dimension at most ``n``.

    Use :func:`build_complex` to construct one from raw records; it runs all
    the structural checks.
    """

    def __init__(self, n: int, simplices: Sequence[Simplex]):
        self.n = n
        self._simplices: Dict[str, Simplex] = {s.id: s for s in simplices}
        self._by_dim: Dict[int, List[str]] = defaultdict(list)
        for s in simplices:
            self._by_dim[s.dim].append(s.id)
        self._vertices: Dict[str, Tuple[str, ...]] = {}
        for k in range(0, n + 1):
            for sid in self._by_dim.get(k, []):
                self._vertices[sid] = self._compute_vertices(sid)
        self._cofaces: Dict[str, List[Tuple[str, int]]] = defaultdict(list)
        for s in simplices:
            for i, f in enumerate(s.faces):
                self._cofaces[f].append((s.id, i))
        self._containing_cache: Dict[str, list] = {}
        self._index = {sid: i for ids in self._by_dim.values() for i, sid in enumerate(ids)}

    def _compute_vertices(self, sid):
        s = self._simplices[sid]
        if s.dim == 0:
            return (sid,)
        if s.dim == 1:
            return (s.faces[1], s.faces[0])
        last = self._vertices[s.faces[s.dim]]
        first = self._vertices[s.faces[0]]
        return last + (first[-1],)

    # -- basic access ------------------------------------------------------

    def __contains__(self, sid) -> bool:
        return sid in self._simplices

    def __getitem__(self, sid) -> Simplex:
        return self._simplices[sid]

    def __iter__(self):
        return iter(self._simplices.values())

    def __len__(self):
        return len(self._simplices)

    def simplices(self, dim: Optional[int] = None) -> List[str]:
        if dim is None:
            return list(self._simplices)
        return list(self._by_dim.get(dim, []))

    @property
    def facets(self) -> List[str]:
        return self.simplices(self.n)

    @property
    def ridges(self) -> List[str]:
        return self.simplices(self.n - 1)

    @property
    def vertex_ids(self) -> List[str]:
        return self.simplices(0)

    def dim(self, sid) -> int:
        return self._simplices[sid].dim

    def vertices(self, sid) -> Tuple[str, ...]:
        return self._vertices[sid]

    def cofaces(self, sid) -> List[Tuple[str, int]]:
        """Simplices having ``sid`` as a codimension-one face, with the face index."""
        return list(self._cofaces.get(sid, ()))

    def face(self, sid, positions: Iterable[int]) -> str:
        """The face of ``sid`` spanned by the given vertex positions."""
        keep = sorted(set(positions))
        cur = sid
        verts = list(range(self._simplices[sid].dim + 1))
        for p in reversed(verts):
            if p not in keep:
                cur = self._simplices[cur].faces[verts.index(p)]
                verts.remove(p)
        return cur

    def containing(self, sid) -> List[Tuple[str, Tuple[int, ...]]]:
        """Every simplex containing ``sid`` (itself included) with the
        positions of ``sid``'s vertices inside it."""
        cached = self._containing_cache.get(sid)
        if cached is not None:
            return cached
        out = {sid: tuple(range(self.dim(sid) + 1))}
        frontier = [sid]
        while frontier:
            nxt = []
            for s in frontier:
                for c, _ in self._cofaces.get(s, ()):
                    if c not in out:
                        cv = self._vertices[c]
                        out[c] = tuple(cv.index(v) for v in self._vertices[sid])
                        nxt.append(c)
            frontier = nxt
        result = sorted(out.items(), key=lambda kv: (self.dim(kv[0]), self._order_key(kv[0])))
        self._containing_cache[sid] = result
        return result

    def _order_key(self, sid):
        return self._index[sid]

    def index(self, sid) -> int:
        """Position of ``sid`` among the simplices of its dimension."""
        return self._index[sid]

    def facets_containing(self, sid) -> List[str]:
        return [s for s, _ in self.containing(sid) if self.dim(s) == self.n]

    def degree(self, ridge) -> int:
        """Number of facets containing ``ridge``."""
        return sum(1 for s, _ in self._cofaces.get(ridge, ()) if self.dim(s) == self.n)

    def opposite_vertex(self, facet, ridge) -> str:
        for s, i in self._cofaces.get(ridge, ()):
            if s == facet:
                return self._vertices[facet][i]
        raise KeyError(f"{ridge!r} is not a face of {facet!r}")

    def records(self) -> List[dict]:
        return [{"id": s.id, "dim": s.dim, "faces": list(s.faces)} for s in self._simplices.values()]


def build_complex(n: int, records: Iterable) -> DeltaComplex:
    """Build and validate a :class:`DeltaComplex`.

    ``records`` holds :class:`Simplex` objects, dicts with ``id``/``dim``/``faces``
    keys, or ``(id, dim, faces)`` tuples.

    Raises
    ------
    DuplicateId, MissingFace, NonRegular, InconsistentFaces, Disconnected,
    DimensionExceeded
    """
    if n < 1:
        raise errors.DimensionExceeded(f"ambient dimension must be at least 1, got {n}")
    simplices: Dict[str, Simplex] = {}
    for rec in records:
        s = _to_simplex(rec)
        if s.id in simplices:
            raise errors.DuplicateId(f"duplicate simplex id {s.id!r}")
        if s.dim > n:
            raise errors.DimensionExceeded(f"simplex {s.id!r} has dimension {s.dim} > {n}")
        if s.dim < 0:
            raise errors.ComplexError(f"simplex {s.id!r} has negative dimension")
        if len(s.faces) != (s.dim + 1 if s.dim > 0 else 0):
            raise errors.ComplexError(
                f"simplex {s.id!r} of dimension {s.dim} needs {s.dim + 1 if s.dim else 0} faces, got {len(s.faces)}"
            )
        simplices[s.id] = s
    if not simplices:
        raise errors.Disconnected("complex has no simplices")
    for s in simplices.values():
        for f in s.faces:
            if f not in simplices:
                raise errors.MissingFace(f"face {f!r} of {s.id!r} does not exist")
            if simplices[f].dim != s.dim - 1:
                raise errors.MissingFace(f"face {f!r} of {s.id!r} has dimension {simplices[f].dim}")
        if len(set(s.faces)) != len(s.faces):
            raise errors.NonRegular(f"simplex {s.id!r} has a repeated face")
    for s in simplices.values():
        if s.dim < 2:
            continue
        for i, j in combinations(range(s.dim + 1), 2):
            a = simplices[s.faces[j]].faces[i]
            b = simplices[s.faces[i]].faces[j - 1]
            if a != b:
                raise errors.InconsistentFaces(
                    f"face maps of {s.id!r} do not commute at ({i}, {j}): {a!r} != {b!r}"
                )
    ordered = sorted(simplices.values(), key=lambda s: s.dim)
    # stable: keep input order within each dimension
    cx = DeltaComplex(n, ordered)
    _check_connected(cx)
    return cx


def _to_simplex(rec) -> Simplex:
    if isinstance(rec, Simplex):
        return rec
    if isinstance(rec, Mapping):
        try:
            return Simplex(str(rec["id"]), int(rec["dim"]), tuple(str(f) for f in rec.get("faces", ())))
        except KeyError as exc:
            raise errors.FormatError(f"simplex record missing key {exc}") from None
    sid, dim, faces = rec
    return Simplex(str(sid), int(dim), tuple(str(f) for f in faces))


def _check_connected(cx: DeltaComplex) -> None:
    verts = cx.vertex_ids
    if not verts:
        raise errors.Disconnected("complex has no vertices")
    parent = {v: v for v in verts}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in cx.simplices(1):
        a, b = cx.vertices(e)
        parent[find(a)] = find(b)
    roots = {find(v) for v in verts}
    if len(roots) > 1:
        raise errors.Disconnected(f"complex has {len(roots)} connected components")


def complex_from_vertex_sets(n: int, cells: Iterable[Sequence], names=None) -> DeltaComplex:
    """Delta-complex of a simplicial complex given by its maximal vertex tuples.

    Vertices are ordered by first appearance; every face of every cell is
    generated. Simplex ids join vertex names (``"a"``, ``"ab"``, ``"abc"`` for
    single-character names, ``"a-b"`` otherwise).
    """
    order: Dict = {}
    all_faces = set()
    for cell in cells:
        for v in cell:
            order.setdefault(v, len(order))
        for k in range(1, len(cell) + 1):
            for sub in combinations(cell, k):
                all_faces.add(tuple(sorted(sub, key=order.__getitem__)))
    single = all(len(str(v)) == 1 for v in order)
    sep = "" if single else "-"

    def name(t):
        if names and t in names:
            return names[t]
        return sep.join(str(v) for v in t)

    recs = []
    for t in sorted(all_faces, key=lambda t: (len(t), [order[v] for v in t])):
        faces = [] if len(t) == 1 else [name(t[:i] + t[i + 1:]) for i in range(len(t))]
        recs.append(Simplex(name(t), len(t) - 1, tuple(faces)))
    return build_complex(n, recs)


def euler_characteristic(cx: DeltaComplex) -> int:
    return sum((-1) ** k * len(cx.simplices(k)) for k in range(cx.n + 1))


# ---------------------------------------------------------------------------
# Weak tropical complexes


AlphaKey = Tuple[str, int]


@dataclass(frozen=True)
class RidgeCheck:
    ridge: str
    alpha_sum: int
    degree: int

    @property
    def ok(self) -> bool:
        return self.alpha_sum == self.degree


class WeakTropicalComplex:
    """A Delta-complex with integer structure constants on its ridges.

    ``alpha`` maps ``(ridge id, vertex position)`` to an integer. In
    dimension one the constants are forced (``alpha(v, v) = deg v``) and are
    filled in when absent. With ``strict`` (the default) the ridge identity is
    enforced and :class:`~tropx.errors.RidgeIdentityViolated` raised on failure.
    """

    def __init__(self, complex: DeltaComplex, alpha: Mapping[AlphaKey, int] | None = None, strict: bool = True):
        self.complex = complex
        cx = complex
        given = {(str(r), int(p)): int(v) for (r, p), v in (alpha or {}).items()}
        for (r, p) in given:
            if r not in cx or cx.dim(r) != cx.n - 1:
                raise errors.UnknownRidgeId(f"structure constant given for non-ridge {r!r}")
            if not 0 <= p < cx.n:
                raise errors.ComplexError(f"vertex position {p} out of range for ridge {r!r}")
        if cx.n == 1:
            for v in cx.ridges:
                given.setdefault((v, 0), cx.degree(v))
        missing = [(r, p) for r in cx.ridges for p in range(cx.n) if (r, p) not in given]
        if missing:
            raise errors.ComplexError(f"missing structure constants for {missing[:5]}")
        self.alpha: Dict[AlphaKey, int] = given
        if strict:
            bad = [c for c in self.ridge_report() if not c.ok]
            if bad:
                raise errors.RidgeIdentityViolated(
                    "structure constants violate the ridge identity at "
                    + ", ".join(f"{c.ridge} ({c.alpha_sum} != {c.degree})" for c in bad),
                    [c.ridge for c in bad],
                )

    @property
    def n(self) -> int:
        return self.complex.n

    def alpha_at(self, ridge: str, pos: int) -> int:
        return self.alpha[(ridge, pos)]

    def alpha_vector(self, ridge: str) -> List[int]:
        return [self.alpha[(ridge, p)] for p in range(self.n)]

    def ridge_report(self) -> List[RidgeCheck]:
        return [RidgeCheck(r, sum(self.alpha_vector(r)), self.complex.degree(r)) for r in self.complex.ridges]

    def with_alpha(self, updates: Mapping[AlphaKey, int], strict: bool = True) -> "WeakTropicalComplex":
        a = dict(self.alpha)
        a.update(updates)
        return WeakTropicalComplex(self.complex, a, strict=strict)


def validate_ridge_identity(W: WeakTropicalComplex) -> List[RidgeCheck]:
    """Per-ridge report of ``sum alpha`` against ``deg r``; never raises."""
    return W.ridge_report()


@dataclass(frozen=True)
class LocalIntersectionMatrix:
    q: str
    ridges: Tuple[str, ...]
    matrix: Tuple[Tuple[int, ...], ...]

    def as_lists(self) -> List[List[int]]:
        return [list(r) for r in self.matrix]


def local_intersection_matrix(W: WeakTropicalComplex, q: str) -> LocalIntersectionMatrix:
    """Local intersection matrix at an (n-2)-simplex ``q``.

    Off-diagonal entries count facets containing both ridges; the diagonal
    holds ``-alpha(v, r)`` for the vertex ``v`` of ``r`` outside ``q``.
    """
    cx = W.complex
    if cx.n < 2:
        raise errors.WrongDimension("local intersection matrices need n >= 2")
    if q not in cx or cx.dim(q) != cx.n - 2:
        raise errors.WrongDimension(f"{q!r} is not an (n-2)-simplex")
    ridges = [(r, i) for r, i in cx.cofaces(q) if cx.dim(r) == cx.n - 1]
    facet_sets = {r: {f for f, _ in cx.cofaces(r) if cx.dim(f) == cx.n} for r, _ in ridges}
    M = []
    for r, i in ridges:
        row = []
        for r2, _ in ridges:
            if r2 == r:
                row.append(-W.alpha_at(r, i))
            else:
                row.append(len(facet_sets[r] & facet_sets[r2]))
        M.append(tuple(row))
    return LocalIntersectionMatrix(q, tuple(r for r, _ in ridges), tuple(M))


@dataclass(frozen=True)
class InertiaTriple:
    n_plus: int
    n_zero: int
    n_minus: int


def inertia(M) -> InertiaTriple:
    """Exact signature of a symmetric integer (or rational) matrix.

    The characteristic polynomial is computed division-free; a symmetric
    matrix has real spectrum, so Descartes' rule of signs counts positive and
    negative roots exactly.
    """
    n = len(M)
    for i in range(n):
        if len(M[i]) != n:
            raise errors.NotSymmetric("matrix is not square")
        for j in range(i):
            if M[i][j] != M[j][i]:
                raise errors.NotSymmetric(f"entries ({i},{j}) and ({j},{i}) differ")
    p = charpoly(M)
    z = 0
    while z < n and p[n - z] == 0:
        z += 1
    g = p[: n + 1 - z]
    pos = sign_variations(g)
    neg = sign_variations([c if (len(g) - 1 - k) % 2 == 0 else -c for k, c in enumerate(g)])
    if pos + neg + z != n:
        raise AssertionError("inertia counts do not add up; matrix is not symmetric over the reals?")
    return InertiaTriple(pos, z, neg)


@dataclass(frozen=True)
class TropicalityReport:
    ok: bool
    failing: Tuple[str, ...]
    inertias: Dict[str, InertiaTriple] = field(default_factory=dict, compare=False)

    def __bool__(self) -> bool:
        return self.ok


def is_tropical_complex(W: WeakTropicalComplex) -> TropicalityReport:
    """Check that every local intersection matrix has exactly one positive eigenvalue."""
    if W.n < 2:
        return TropicalityReport(True, ())
    failing = []
    inert = {}
    for q in W.complex.simplices(W.n - 2):
        t = inertia(local_intersection_matrix(W, q).matrix)
        inert[q] = t
        if t.n_plus != 1:
            failing.append(q)
    return TropicalityReport(not failing, tuple(failing), inert)


def canonical_divisor(W: WeakTropicalComplex):
    """``K = sum (deg r - 2) [r]``."""
    from .divisors import RidgeDivisor

    cx = W.complex
    return RidgeDivisor(W, {r: cx.degree(r) - 2 for r in cx.ridges})


def from_degeneration_data(complex: DeltaComplex, intersections: Mapping[AlphaKey, int]) -> WeakTropicalComplex:
    """Weak tropical complex with ``alpha(v, r) = -deg(C_v . C_r)``.

    ``intersections`` is keyed by ``(ridge id, vertex position)``. Raises
    :class:`~tropx.errors.RidgeIdentityViolated` when the numbers cannot come
    from a semistable degeneration.
    """
    alpha = {(r, p): -int(x) for (r, p), x in intersections.items()}
    if complex.n == 1:
        for v in complex.ridges:
            if (v, 0) not in alpha:
                raise errors.ComplexError(f"missing intersection number for vertex {v!r}")
    return WeakTropicalComplex(complex, alpha, strict=True)


def relabel(W: WeakTropicalComplex, mapping: Mapping[str, str]) -> WeakTropicalComplex:
    """Copy of ``W`` with simplex ids renamed through ``mapping``."""
    cx = W.complex
    recs = [Simplex(mapping.get(s.id, s.id), s.dim, tuple(mapping.get(f, f) for f in s.faces)) for s in cx]
    new = build_complex(cx.n, recs)
    alpha = {(mapping.get(r, r), p): v for (r, p), v in W.alpha.items()}
    return WeakTropicalComplex(new, alpha, strict=False)
