"""Order-m subdivisions of weak tropical complexes of dimension one and two.

Each simplex of the base is replaced by a unimodular triangulation of its
``m``-fold dilation. Every simplex of the subdivision is keyed by its *host*
(the smallest base simplex containing its interior) and the integer
coordinates of its vertices in the host, which sum to ``m``.

Structure constants of new ridges come from two rules: ridges inside a base
facet use the midpoint rule, ridges inside a base ridge are obtained by
inverting the vertex-coordinate matrix of the small ridge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Callable, Dict, List, Sequence, Tuple

from . import errors
from .complex_core import Simplex, WeakTropicalComplex, build_complex
from .divisors import PLFunction, RationalPoint, RidgeDivisor, minimal_simplex
from .exact_linalg import Inconsistent, solve_rational

Coord = Tuple[int, ...]
Key = Tuple[str, Tuple[Coord, ...]]


def standard_triangulation(k: int, m: int) -> List[Tuple[Coord, ...]]:
    """Top-dimensional cells of the staircase triangulation of ``m`` times the
    standard ``k``-simplex, as tuples of lattice points.

    In dimension two the cells are cut out by the three families of lines
    parallel to the sides, so the result does not depend on vertex order.
    """
    if k == 0:
        return [((m,),)]
    if k == 1:
        return [((m - i, i), (m - i - 1, i + 1)) for i in range(m)]
    if k == 2:
        cells = []
        for a in range(m):
            for b in range(m - a):
                c = m - 1 - a - b
                cells.append(((a + 1, b, c), (a, b + 1, c), (a, b, c + 1)))
        for a in range(1, m + 1):
            for b in range(1, m + 2 - a):
                c = m + 1 - a - b
                if c >= 1:
                    cells.append(((a - 1, b, c), (a, b - 1, c), (a, b, c - 1)))
        return cells
    raise errors.UnsupportedDimension(f"no triangulation available for dimension {k}")


@dataclass
class SubdivisionMap:
    """Correspondence between an order-``m`` subdivision and its base."""

    source: WeakTropicalComplex
    order: int
    target: WeakTropicalComplex = None
    host: Dict[str, str] = field(default_factory=dict)
    key: Dict[str, Key] = field(default_factory=dict)
    by_key: Dict[Key, str] = field(default_factory=dict)

    def coords(self, vertex: str) -> Tuple[str, Coord]:
        """Host simplex and integer coordinates (summing to ``m``) of a vertex."""
        h, (c,) = self.key[vertex]
        return h, c

    def point(self, sid: str, host: str | None = None) -> List[Tuple[Fraction, ...]]:
        """Barycentric coordinates of the vertices of ``sid`` in ``host``
        (default: its own host)."""
        h, cs = self.key[sid]
        pts = [tuple(Fraction(x, self.order) for x in c) for c in cs]
        if host is None or host == h:
            return pts
        return [_embed(self.source, h, host, p) for p in pts]

    def vertex_at(self, p: RationalPoint) -> str | None:
        """The subdivision vertex sitting at ``p``, if any."""
        g = minimal_simplex(self.source, p)
        local = tuple(p.coords[i] * self.order for i in p.support())
        if any(x.denominator != 1 for x in local):
            return None
        return self.by_key.get((g, (tuple(int(x) for x in local),)))

    def locate(self, p: RationalPoint) -> str:
        """Smallest simplex of the subdivision whose closure contains ``p``."""
        g = minimal_simplex(self.source, p)
        local = tuple(p.coords[i] for i in p.support())
        for sid, h in self.host.items():
            if h != g:
                continue
            lam = _barycentric(self.point(sid), local)
            if lam is not None and all(x > 0 for x in lam):
                return sid
        raise errors.PointOutsideComplex(f"could not locate {p}")


def _embed(base: WeakTropicalComplex, face: str, host: str, p):
    cx = base.complex
    pos = dict(cx.containing(face))[host]
    out = [Fraction(0)] * (cx.dim(host) + 1)
    for i, x in zip(pos, p):
        out[i] = x
    return tuple(out)


def _barycentric(verts, point):
    """Coefficients expressing ``point`` as an affine combination of ``verts``."""
    A = [[v[i] for v in verts] for i in range(len(point))]
    x = solve_rational(A, list(point))
    if isinstance(x, Inconsistent):
        return None
    return x


def _lex_desc(c: Coord):
    return tuple(-x for x in c)


_CACHE_ATTR = "_subdivision_cache"


def subdivide(W: WeakTropicalComplex, m: int, triangulation: Callable = standard_triangulation):
    """Order-``m`` subdivision of ``W``.

    Returns ``(W', SubdivisionMap)``. All new structure constants are checked
    to be integers and the ridge identity is re-verified on ``W'``.
    """
    if m < 1:
        raise ValueError("subdivision order must be at least 1")
    if W.n > 2:
        raise errors.UnsupportedDimension("subdivisions are implemented for n <= 2")
    cache = W.__dict__.setdefault(_CACHE_ATTR, {})
    if triangulation is standard_triangulation and m in cache:
        return cache[m]
    result = _subdivide(W, m, triangulation)
    if triangulation is standard_triangulation:
        cache[m] = result
    return result


def _subdivide(W: WeakTropicalComplex, m: int, triangulation: Callable):
    cx = W.complex
    smap = SubdivisionMap(W, m)
    cells: Dict[Key, Tuple[int, Tuple[Coord, ...]]] = {}

    def canon(s: str, pts: Sequence[Coord]) -> Key:
        supp = sorted({i for c in pts for i, x in enumerate(c) if x})
        h = cx.face(s, supp) if len(supp) < len(pts[0]) else s
        local = sorted((tuple(c[i] for i in supp) for c in pts), key=_lex_desc)
        return h, tuple(local)

    for s in cx.simplices():
        k = cx.dim(s)
        for cell in triangulation(k, m):
            for size in range(1, len(cell) + 1):
                for sub in combinations(cell, size):
                    key = canon(s, sub)
                    if key not in cells:
                        cells[key] = size - 1

    def ident(key: Key) -> str:
        h, cs = key
        if m == 1:
            return h
        return f"{h}:" + "|".join(".".join(str(x) for x in c) for c in cs)

    def face_key(key: Key, drop: int) -> Key:
        h, cs = key
        rest = cs[:drop] + cs[drop + 1:]
        return canon(h, rest)

    ordered = sorted(
        cells.items(),
        key=lambda kv: (kv[1], cx.dim(kv[0][0]), cx.index(kv[0][0]), [_lex_desc(c) for c in kv[0][1]]),
    )
    recs = []
    for key, d in ordered:
        sid = ident(key)
        faces = tuple(ident(face_key(key, i)) for i in range(d + 1)) if d > 0 else ()
        recs.append(Simplex(sid, d, faces))
        smap.key[sid] = key
        smap.by_key[key] = sid
        smap.host[sid] = key[0]
    if m == 1:
        smap.target = W
        return W, smap
    new_cx = build_complex(cx.n, recs)
    alpha = _transfer_constants(W, new_cx, smap)
    W2 = WeakTropicalComplex(new_cx, alpha, strict=True)
    W2.__dict__["_base"] = W
    W2.__dict__["_order"] = m
    W2.__dict__["_map"] = smap
    smap.target = W2
    return W2, smap


def _transfer_constants(W, new_cx, smap):
    cx = W.complex
    n = cx.n
    m = smap.order
    alpha = {}
    if n == 1:
        return alpha  # forced by the ridge identity; filled by the constructor
    for r2 in new_cx.ridges:
        h = smap.host[r2]
        r2_pts = list(smap.key[r2][1])
        if cx.dim(h) == n:
            # midpoint rule inside a base facet
            ws = [smap.key[f][1] for f in new_cx.facets_containing(r2)]
            opp = []
            for cs in ws:
                extra = [c for c in cs if c not in r2_pts]
                opp.append(extra[0])
            if len(opp) != 2:
                raise AssertionError(f"interior ridge {r2} is not in exactly two facets")
            mid = [Fraction(a + b, 2) for a, b in zip(*opp)]
            A = [[c[i] for c in r2_pts] for i in range(len(mid))]
            c = solve_rational(A, mid)
            if isinstance(c, Inconsistent) or sum(c) != 1:
                raise AssertionError(f"midpoint of the facets around {r2} is off its affine span")
            vals = [2 * x for x in c]
        elif cx.dim(h) == n - 1:
            # ridge of the subdivision inside the base ridge h
            rhs = [Fraction(a) for a in W.alpha_vector(h)]
            hpos = dict(cx.containing(h))
            for f in new_cx.facets_containing(r2):
                fh = smap.host[f]
                pos = hpos[fh]
                cs = smap.key[f][1]
                w = [c for c in cs if c not in [_embed_int(cx, h, fh, p) for p in r2_pts]]
                if len(w) != 1:
                    raise AssertionError(f"cannot find the apex over {r2} in {f}")
                w = w[0]
                outside = [w[i] for i in range(len(w)) if i not in pos]
                if outside != [1]:
                    raise AssertionError(f"cell {f} over {r2} is not unimodular")
                for j, i in enumerate(pos):
                    rhs[j] += w[i]
            Y = [[y[j] for y in r2_pts] for j in range(n)]
            vals = solve_rational(Y, rhs)
            if isinstance(vals, Inconsistent):
                raise AssertionError(f"singular vertex matrix for {r2}")
        else:
            raise AssertionError(f"ridge {r2} hosted by a simplex of dimension {cx.dim(h)}")
        if any(Fraction(v).denominator != 1 for v in vals):
            raise AssertionError(f"non-integral structure constants {vals} on {r2}")
        # r2_pts follows lexicographic order, which is the vertex order of r2
        for p, v in enumerate(vals):
            alpha[(r2, p)] = int(v)
    return alpha


def _embed_int(cx, face, host, c):
    pos = dict(cx.containing(face))[host]
    out = [0] * (cx.dim(host) + 1)
    for i, x in zip(pos, c):
        out[i] = x
    return tuple(out)


def base_of_complex(W: WeakTropicalComplex) -> WeakTropicalComplex:
    return W.__dict__.get("_base", W)


def order_of(W: WeakTropicalComplex) -> int:
    return W.__dict__.get("_order", 1)


def map_of(W: WeakTropicalComplex) -> SubdivisionMap | None:
    return W.__dict__.get("_map")


def base_of(D) -> WeakTropicalComplex:
    return base_of_complex(D.host)


def refine_divisor(D: RidgeDivisor, m: int) -> RidgeDivisor:
    """Re-express ``D`` on the order-``m`` subdivision of its base.

    ``D`` may itself live on an order-``k`` subdivision with ``k | m``.
    """
    base = base_of(D)
    k = order_of(D.host)
    if m % k:
        raise ValueError(f"order {m} is not a multiple of the divisor's order {k}")
    if k == m:
        return D
    Wm, smap = subdivide(base, m)
    coeffs = {}
    if k == 1:
        for r2 in Wm.complex.ridges:
            h = smap.host[r2]
            if h in D.coeffs:
                coeffs[r2] = D.coeffs[h]
        return RidgeDivisor(Wm, coeffs, m)
    kmap = map_of(D.host)
    by_host: Dict[str, List[str]] = {}
    for r in D.coeffs:
        by_host.setdefault(kmap.host[r], []).append(r)
    for r2 in Wm.complex.ridges:
        h = smap.host[r2]
        for r in by_host.get(h, ()):
            big = kmap.point(r)
            if all(_inside(big, p) for p in smap.point(r2)):
                coeffs[r2] = D.coeffs[r]
                break
    return RidgeDivisor(Wm, coeffs, m)


def _inside(verts, p) -> bool:
    lam = _barycentric(verts, p)
    return lam is not None and all(x >= 0 for x in lam)


def transfer_pl(smap: SubdivisionMap, phi: PLFunction) -> PLFunction:
    """``m * phi`` as a function on the subdivision."""
    if phi.host is not smap.source:
        raise errors.DimensionMismatch("function does not live on the subdivided complex")
    cx = smap.source.complex
    values = {}
    for v in smap.target.complex.vertex_ids:
        h, c = smap.coords(v)
        values[v] = sum(x * phi[u] for x, u in zip(c, cx.vertices(h)))
    return PLFunction(smap.target, values, order=smap.order)


def promote_point(W: WeakTropicalComplex, p: RationalPoint):
    """Smallest subdivision order making ``p`` a vertex.

    Returns ``(m, W', vertex id)``.
    """
    m, W2, (v,) = promote_points(W, [p])
    return m, W2, v


def promote_points(W: WeakTropicalComplex, points: Sequence[RationalPoint], multiple_of: int = 1):
    m = multiple_of
    for p in points:
        for c in p.coords:
            m = lcm(m, c.denominator)
    W2, smap = subdivide(W, m)
    ids = []
    for p in points:
        v = smap.vertex_at(p)
        if v is None:
            raise AssertionError(f"{p} did not become a vertex at order {m}")
        ids.append(v)
    return m, W2, ids
