"""Two-dimensional worked examples and the h0 machinery around them.

Fixtures: the tetrahedron with all structure constants 1, the
circumference-2 cylinder with parametrized boundary constants, and the
triangulated square arising from a toric degeneration of P1 x P1.

h0 is only ever bracketed. Lower bounds come with explicit certificates (an
effective equivalent divisor through the points, plus the PL function). Upper
bounds come from exhausting a finite family of PL functions and are reported
as such.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import LinearConstraint, linprog, milp

from . import errors
from .complex_core import (
    Simplex,
    WeakTropicalComplex,
    build_complex,
    canonical_divisor,
    complex_from_vertex_sets,
    euler_characteristic,
    is_tropical_complex,
)
from .divisors import (
    LinearEquivalenceCertificate,
    PLFunction,
    RationalPoint,
    RidgeDivisor,
    class_group,
    div_matrix,
    div_pl,
    is_cartier,
    lin_equiv,
    weil_lattice,
)
from .exact_linalg import Inconsistent, solve_rational
from .subdivision import map_of, order_of, refine_divisor, subdivide

# -- fixtures ---------------------------------------------------------------------


def make_tetrahedron() -> WeakTropicalComplex:
    """Boundary of the tetrahedron on ``a, b, c, d`` with every alpha = 1."""
    cx = complex_from_vertex_sets(2, ["abc", "abd", "acd", "bcd"])
    return WeakTropicalComplex(cx, {(r, p): 1 for r in cx.ridges for p in range(2)})


# Cylinder of circumference 2 and height 1. Bottom vertices B0, B1, top
# vertices T0, T1; "e" is the seam B0-T0, "c" the central vertical edge B1-T1.
# Both squares are cut by a diagonal going from bottom-left to top-right.
CYLINDER_EDGES = {
    "b": ("B0", "B1"),
    "b2": ("B1", "B0"),
    "t": ("T0", "T1"),
    "t2": ("T1", "T0"),
    "e": ("B0", "T0"),
    "c": ("B1", "T1"),
    "d": ("B0", "T1"),
    "d2": ("B1", "T0"),
}
CYLINDER_FACETS = {
    "f1": ("c", "d", "b"),  # B0 B1 T1
    "f2": ("t", "d", "e"),  # B0 T0 T1
    "f3": ("e", "d2", "b2"),  # B1 B0 T0
    "f4": ("t2", "d2", "c"),  # B1 T1 T0
}
CYLINDER_BOUNDARY = ("b", "b2", "t", "t2")


@dataclass(frozen=True)
class CylinderSpec:
    """Boundary constants: ``alpha`` at the first endpoint of each boundary
    edge; the second endpoint gets ``1 - alpha``."""

    constants: Tuple[int, int, int, int]

    def alpha(self) -> Dict[Tuple[str, int], int]:
        out = {}
        for r in ("e", "c", "d", "d2"):
            out[(r, 0)] = out[(r, 1)] = 1
        for r, a in zip(CYLINDER_BOUNDARY, self.constants):
            out[(r, 0)] = a
            out[(r, 1)] = 1 - a
        return out


def _cylinder_complex():
    recs = [Simplex(v, 0, ()) for v in ("B0", "B1", "T0", "T1")]
    recs += [Simplex(r, 1, (w, u)) for r, (u, w) in CYLINDER_EDGES.items()]
    recs += [Simplex(f, 2, faces) for f, faces in CYLINDER_FACETS.items()]
    return build_complex(2, recs)


def make_cylinder(constants) -> WeakTropicalComplex:
    """Cylinder with the given boundary constants.

    ``constants`` is a :class:`CylinderSpec`, a 4-tuple of first-endpoint
    values for ``b, b2, t, t2``, or a mapping ``edge -> (alpha0, alpha1)``.
    """
    if isinstance(constants, Mapping):
        alpha = CylinderSpec((0, 0, 0, 0)).alpha()
        for r, pair in constants.items():
            if r not in CYLINDER_BOUNDARY:
                raise errors.UnknownRidgeId(f"{r!r} is not a boundary edge")
            alpha[(r, 0)], alpha[(r, 1)] = pair
    else:
        if not isinstance(constants, CylinderSpec):
            constants = CylinderSpec(tuple(constants))
        alpha = constants.alpha()
    return WeakTropicalComplex(_cylinder_complex(), alpha)


def cylinder_top(W) -> RidgeDivisor:
    return RidgeDivisor(W, {"t": 1, "t2": 1})


def cylinder_generator(W) -> RidgeDivisor:
    return RidgeDivisor(W, {"t": 1, "c": 1, "e": -1})


@dataclass
class CalibrationHit:
    constants: Tuple[int, ...]
    certificate: LinearEquivalenceCertificate


@dataclass
class CalibrationReport:
    box: int
    tried: int
    hits: List[CalibrationHit]

    def __bool__(self):
        return bool(self.hits)


def check_cylinder(W, max_order: int = 2) -> Dict[str, object]:
    """The four properties the calibration looks for, evaluated on ``W``."""
    trop = bool(is_tropical_complex(W))
    g = class_group(W, "weil")
    rank = len(weil_lattice(W))
    cert = lin_equiv(cylinder_top(W), 2 * cylinder_generator(W), max_order)
    return {
        "tropical": trop,
        "weil_class_group": g,
        "weil_rank": rank,
        "certificate": cert if cert else None,
        "ok": trop and g.free_rank == 1 and not g.invariant_factors and rank == 4 and bool(cert),
    }


def calibrate_cylinder(box: int = 3, max_order: int = 2) -> CalibrationReport:
    """All boundary constants in ``[-box, box]`` for which the cylinder is
    tropical, has Weil class group Z, a rank-4 Weil lattice and satisfies
    ``2 ([t] + [c] - [e]) ~ [t] + [t2]``."""
    hits, tried = [], 0
    for cs in product(range(-box, box + 1), repeat=4):
        tried += 1
        W = make_cylinder(cs)
        if not is_tropical_complex(W):
            continue
        g = class_group(W, "weil")
        if g.free_rank != 1 or g.invariant_factors or len(weil_lattice(W)) != 4:
            continue
        cert = lin_equiv(cylinder_top(W), 2 * cylinder_generator(W), max_order)
        if cert:
            hits.append(CalibrationHit(cs, cert))
    return CalibrationReport(box, tried, hits)


def make_square() -> WeakTropicalComplex:
    """Unit square ``p00, p10, p01, p11`` cut along the diagonal ``p00-p11``,
    with the constants of the toric degeneration of P1 x P1 whose bounded
    cells are the two triangles."""
    cx = complex_from_vertex_sets(2, [("p00", "p10", "p11"), ("p00", "p01", "p11")])
    # alpha(v, r) = -deg C_v . C_r is minus the self-intersection of C_r in
    # the component of the *other* endpoint w. In the toric fan at w that is
    # a, where the neighbours of r's ray sum to a times the ray: 1 at the
    # diagonal's endpoints, 0 at the other two corners.
    hot = {"p00", "p11"}
    alpha = {}
    for r in cx.ridges:
        u, w = cx.vertices(r)
        alpha[(r, 0)] = 1 if w in hot else 0
        alpha[(r, 1)] = 1 if u in hot else 0
    return WeakTropicalComplex(cx, alpha)


# intersection numbers of a ruling line with the curves of the special fiber
SQUARE_INTERSECTIONS = [
    (("p00", "p10"), 1),
    (("p10", "p11"), 1),
    (("p00", "p01"), 1),
    (("p01", "p11"), 1),
    (("p00", "p11"), -1),
]


def ridge_by_vertices(W, verts) -> str:
    cx = W.complex
    hits = [r for r in cx.ridges if set(cx.vertices(r)) == set(verts)]
    if len(hits) != 1:
        raise errors.UnknownRidgeId(f"no unique ridge on vertices {verts}")
    return hits[0]


def square_intersections(W) -> Dict[str, int]:
    return {ridge_by_vertices(W, vs): x for vs, x in SQUARE_INTERSECTIONS}


# -- PL-function search ---------------------------------------------------------------


def ridges_through(W, p: RationalPoint) -> List[str]:
    """Ridges of ``W`` whose closure contains ``p``; ``W`` may be a
    subdivision, with ``p`` given on its base."""
    smap = map_of(W) or subdivide(W, 1)[1]
    s = smap.locate(p)
    cx = W.complex
    k = cx.dim(s)
    if k == W.n - 1:
        return [s]
    if k > W.n - 1:
        return []
    return [t for t, _ in cx.containing(s) if cx.dim(t) == W.n - 1]


@dataclass
class _Problem:
    """``D + A phi >= 0``, plus one ridge with coefficient >= 1 per point."""

    W: WeakTropicalComplex
    ridges: List[str]
    verts: List[str]
    A: List[List[int]]
    d: List[int]
    covers: List[List[int]]
    avoid: List[int] = field(default_factory=list)


def _problem(W_k, Dk: RidgeDivisor, points, avoid=()) -> _Problem:
    ridges = list(W_k.complex.ridges)
    ridx = {r: i for i, r in enumerate(ridges)}
    covers = [[ridx[r] for r in ridges_through(W_k, p)] for p in points]
    return _Problem(
        W_k, ridges, list(W_k.complex.vertex_ids), div_matrix(W_k), Dk.int_vector(), covers,
        [ridx[r] for r in avoid],
    )


def _system(pb: _Problem, bound: int, choice=None):
    """Rows ``(M, b)`` of ``M x >= b``.

    Unknowns are the vertex values, followed (when ``choice`` is None) by one
    0/1 indicator per (point, covering ridge) pair. With ``choice`` the
    covering ridge of each point is fixed instead.
    """
    nv = len(pb.verts)
    ny = 0 if choice is not None else sum(len(c) for c in pb.covers)
    width = nv + ny
    M, b = [], []

    def row(coeffs, rhs):
        r = [0] * width
        for j, a in coeffs:
            r[j] += a
        M.append(r)
        b.append(rhs)

    for i, Ai in enumerate(pb.A):
        terms = [(v, a) for v, a in enumerate(Ai) if a]
        row(terms, -pb.d[i])
        if i in pb.avoid:
            row([(v, -a) for v, a in terms], pb.d[i])
    if choice is not None:
        for i in set(choice):
            row([(v, a) for v, a in enumerate(pb.A[i]) if a], 1 - pb.d[i])
    else:
        j = nv
        for cover in pb.covers:
            picks = []
            for i in cover:
                row([(v, a) for v, a in enumerate(pb.A[i]) if a] + [(j, -1)], -pb.d[i])
                picks.append((j, 1))
                j += 1
            row(picks, 1)
    for v in range(nv):
        row([(v, 1)], -bound)
        row([(v, -1)], -bound)
    for j in range(nv, width):
        row([(j, 1)], 0)
        row([(j, -1)], -1)
    return M, b, width


def _milp(pb: _Problem, bound: int):
    """Integer vertex values with |phi| <= bound solving the problem, or None.
    Floating-point; callers re-check any answer exactly."""
    if any(not c for c in pb.covers):
        return None
    M, b, width = _system(pb, bound)
    # smallest total coefficient keeps certificates readable
    cost = np.zeros(width)
    cost[: len(pb.verts)] = np.array(pb.A, dtype=float).sum(axis=0)
    res = milp(
        c=cost,
        constraints=[LinearConstraint(np.array(M, dtype=float), np.array(b, dtype=float), np.inf)],
        integrality=np.ones(width),
    )
    if res.x is None:
        return None
    return [int(round(x)) for x in res.x[: len(pb.verts)]]


def _check(pb: _Problem, phi: Sequence[int]) -> bool:
    coeff = [pb.d[i] + sum(a * x for a, x in zip(pb.A[i], phi)) for i in range(len(pb.ridges))]
    if any(c < 0 for c in coeff):
        return False
    if any(coeff[i] != 0 for i in pb.avoid):
        return False
    return all(any(coeff[i] >= 1 for i in cover) for cover in pb.covers)


@dataclass
class FarkasCertificate:
    """``y >= 0`` with ``y M = 0`` and ``y b > 0``: the system ``M x >= b``
    has no real solution."""

    y: List[Fraction]

    def verify(self, M, b) -> bool:
        if len(self.y) != len(M) or any(t < 0 for t in self.y):
            return False
        width = len(M[0]) if M else 0
        for j in range(width):
            if sum(t * M[i][j] for i, t in enumerate(self.y) if t):
                return False
        return sum(t * bi for t, bi in zip(self.y, b)) > 0


def farkas(M, b) -> Optional[FarkasCertificate]:
    """Exact infeasibility certificate for ``M x >= b``, if the floating LP
    finds one whose basis can be solved exactly; None otherwise (which proves
    nothing)."""
    if not M:
        return None
    Mf = np.array(M, dtype=float)
    m, width = Mf.shape
    res = linprog(
        -np.array(b, dtype=float),
        A_eq=Mf.T,
        b_eq=np.zeros(width),
        bounds=[(0, 1)] * m,
        method="highs",
    )
    if res.status != 0 or -res.fun <= 1e-9:
        return None
    y = res.x
    upper = [i for i in range(m) if y[i] > 1 - 1e-9]
    basic = [i for i in range(m) if 1e-9 < y[i] <= 1 - 1e-9]
    rhs = [-sum(M[i][j] for i in upper) for j in range(width)]
    exact = [Fraction(0)] * m
    for i in upper:
        exact[i] = Fraction(1)
    if basic:
        sol = solve_rational([[M[i][j] for i in basic] for j in range(width)], rhs)
        if isinstance(sol, Inconsistent):
            return None
        for i, t in zip(basic, sol):
            exact[i] = t
    cert = FarkasCertificate(exact)
    return cert if cert.verify(M, b) else None


def _exhaust(pb: _Problem, bound: int):
    """Exact decision over all integer phi with |phi| <= bound.

    Returns ``(phi or None, proofs)``. Infeasibility is shown either by one
    Farkas certificate for the relaxed problem, or per choice of covering
    ridges by a certificate or, failing that, a depth-first search with
    interval propagation.
    """
    M, b, _ = _system(pb, bound)
    cert = farkas(M, b)
    if cert is not None:
        return None, ["relaxation"]
    proofs = []
    for choice in product(*pb.covers):
        M, b, width = _system(pb, bound, choice)
        if farkas(M, b) is not None:
            proofs.append("choice")
            continue
        rows = [([(j, a) for j, a in enumerate(r) if a], bi) for r, bi in zip(M, b)]
        sol = _cp_search(rows, [-bound] * width, [bound] * width)
        if sol is not None:
            return sol, proofs
        proofs.append("search")
    return None, proofs


def _propagate(rows, lo, hi) -> bool:
    changed = True
    while changed:
        changed = False
        for terms, b in rows:
            top = sum(a * (hi[v] if a > 0 else lo[v]) for v, a in terms)
            if top < b:
                return False
            for v, a in terms:
                need = b - (top - a * (hi[v] if a > 0 else lo[v]))
                if a > 0:
                    new = -((-need) // a)
                    if new > lo[v]:
                        lo[v] = new
                        changed = True
                else:
                    new = need // a
                    if new < hi[v]:
                        hi[v] = new
                        changed = True
                if lo[v] > hi[v]:
                    return False
    return True


def _cp_search(rows, lo, hi):
    lo, hi = list(lo), list(hi)
    if not _propagate(rows, lo, hi):
        return None
    open_vars = [v for v in range(len(lo)) if lo[v] < hi[v]]
    if not open_vars:
        return lo
    v = min(open_vars, key=lambda u: hi[u] - lo[u])
    mid = (lo[v] + hi[v]) // 2
    for x in sorted(range(lo[v], hi[v] + 1), key=lambda t: abs(t - mid)):
        l2, h2 = list(lo), list(hi)
        l2[v] = h2[v] = x
        sol = _cp_search(rows, l2, h2)
        if sol is not None:
            return sol
    return None


def _certificate(W_k, k, D, phi_vals, pb) -> Tuple[LinearEquivalenceCertificate, RidgeDivisor]:
    phi = PLFunction(W_k, dict(zip(pb.verts, phi_vals)), order=k)
    Dk = refine_divisor(D, k)
    Dprime = Dk + div_pl(W_k, phi)
    neg = PLFunction(W_k, {v: -x for v, x in phi.values.items()}, order=k)
    cert = LinearEquivalenceCertificate(k, neg, D, Dprime)
    return cert, Dprime


def _orders(D, max_order):
    k0 = order_of(D.host)
    return [k for k in range(1, max_order + 1) if k % k0 == 0]


def _base(D):
    from .subdivision import base_of

    return base_of(D)


@dataclass
class EffectiveCertificate:
    """An effective ``Dprime ~ D`` whose support contains ``points``."""

    points: Tuple[RationalPoint, ...]
    equivalence: LinearEquivalenceCertificate
    Dprime: RidgeDivisor

    def verify(self) -> bool:
        Dp = self.Dprime
        if not Dp.is_effective() or not self.equivalence.verify():
            return False
        if self.equivalence.Dprime != Dp:
            return False
        for p in self.points:
            if not any(Dp[r] > 0 for r in ridges_through(Dp.host, p)):
                return False
        return True


def effective_equivalent(D: RidgeDivisor, points: Sequence[RationalPoint] = (), max_order: int = 2,
                         bound: int = 64, avoid_support: bool = False) -> Optional[EffectiveCertificate]:
    """Search orders ``1..max_order`` for an effective divisor equivalent to
    ``D`` through every point. Solutions from the integer program are
    re-verified exactly before being returned.

    With ``avoid_support`` the new divisor must also vanish on every ridge
    meeting the support of ``D``.
    """
    W = _base(D)
    for k in _orders(D, max_order):
        W_k, _ = subdivide(W, k)
        Dk = refine_divisor(D, k)
        if not Dk.is_integral():
            continue
        avoid = _touching(W_k, Dk) if avoid_support else ()
        pb = _problem(W_k, Dk, points, avoid)
        phi = _milp(pb, bound)
        if phi is None or not _check(pb, phi):
            continue
        cert, Dprime = _certificate(W_k, k, D, phi, pb)
        out = EffectiveCertificate(tuple(points), cert, Dprime)
        if not out.verify():
            raise AssertionError("effective-equivalent certificate failed re-verification")
        return out
    return None


def _touching(W_k, Dk) -> List[str]:
    cx = W_k.complex
    verts = {v for r in Dk.support for v in cx.vertices(r)}
    return [r for r in cx.ridges if verts & set(cx.vertices(r))]


# -- h0 bounds ---------------------------------------------------------------------------


@dataclass
class BoundedExhaustion:
    """Outcome of exhausting the family ``(order <= max_order, |phi| <= bound)``.

    ``found`` is a certificate if some member covers all points (the upper
    bound attempt failed); otherwise the record states that no member does.
    """

    points: Tuple[RationalPoint, ...]
    max_order: int
    bound: int
    found: Optional[EffectiveCertificate]
    proofs: Dict[int, List[str]] = field(default_factory=dict)

    @property
    def exhausted(self) -> bool:
        return self.found is None

    def statement(self) -> str:
        if self.found is not None:
            return f"family member at order {self.found.equivalence.order} covers all {len(self.points)} points"
        return (
            f"no counterexample within family: no PL function on subdivisions of order <= {self.max_order} "
            f"with |phi| <= {self.bound} gives an effective equivalent through all {len(self.points)} points"
        )


def h0_upper_bound_bounded(D: RidgeDivisor, points: Sequence[RationalPoint], max_order: int = 2,
                           bound: int = 8) -> BoundedExhaustion:
    """Exhaust the bounded family exactly. A candidate from the integer
    program is only trusted after exact re-verification; infeasibility is
    settled by exact depth-first search, not by the solver."""
    W = _base(D)
    proofs: Dict[int, List[str]] = {}
    for k in _orders(D, max_order):
        W_k, _ = subdivide(W, k)
        Dk = refine_divisor(D, k)
        if not Dk.is_integral():
            continue
        pb = _problem(W_k, Dk, points)
        if any(not c for c in pb.covers):
            proofs[k] = ["uncoverable"]
            continue
        phi = _milp(pb, bound)
        if phi is None or not _check(pb, phi):
            phi, how = _exhaust(pb, bound)
            proofs[k] = how
        if phi is not None:
            cert, Dprime = _certificate(W_k, k, D, phi, pb)
            found = EffectiveCertificate(tuple(points), cert, Dprime)
            if not found.verify():
                raise AssertionError("bounded search produced an invalid certificate")
            return BoundedExhaustion(tuple(points), max_order, bound, found, proofs)
    return BoundedExhaustion(tuple(points), max_order, bound, None, proofs)


@dataclass
class H0Report:
    D: RidgeDivisor
    lower: int
    certificates: List[EffectiveCertificate]
    upper: Optional[int] = None
    upper_record: Optional[BoundedExhaustion] = None

    @property
    def exact(self) -> bool:
        """Lower bound meets the bounded upper search. Not a proof on its own:
        the upper side only covers a finite family."""
        return self.upper is not None and self.lower == self.upper

    def verify(self) -> bool:
        return all(c.verify() for c in self.certificates)


def h0_lower_bound(D: RidgeDivisor, point_sets: Iterable[Sequence[RationalPoint]], max_order: int = 2,
                   bound: int = 64) -> H0Report:
    """``1 + `` the largest tested point set with a certified effective
    equivalent through it. The empty set is always tried first; if ``D`` has
    no effective equivalent at all the bound is 0."""
    certs = []
    best = -1
    for P in [()] + [tuple(P) for P in point_sets]:
        c = effective_equivalent(D, P, max_order, bound)
        if c is not None:
            certs.append(c)
            best = max(best, len(P))
    return H0Report(D, best + 1, certs)


def h0_bracket(D: RidgeDivisor, lower_sets, upper_points, max_order: int = 2, upper_order: int = 2,
               bound: int = 8) -> H0Report:
    rep = h0_lower_bound(D, lower_sets, max_order)
    rec = h0_upper_bound_bounded(D, upper_points, upper_order, bound)
    rep.upper_record = rec
    if rec.exhausted:
        rep.upper = len(upper_points)
    return rep


# -- pairing and Riemann-Roch -------------------------------------------------------------


@dataclass
class Unknown:
    max_order: int

    def __bool__(self):
        return False


@dataclass
class PairingZero:
    value: int
    certificate: Optional[EffectiveCertificate]


def self_pairing_disjoint(D: RidgeDivisor, max_order: int = 2):
    """Degree of ``D . D`` when it is forced to vanish by a disjoint effective
    representative; :class:`Unknown` if none is found."""
    if not D.is_effective():
        raise ValueError("D must be effective")
    if D.is_zero():
        return PairingZero(0, None)
    c = effective_equivalent(D, (), max_order, avoid_support=True)
    if c is None:
        return Unknown(max_order)
    return PairingZero(0, c)


@dataclass
class RRCheck:
    D: RidgeDivisor
    h0_D: int
    h0_KD: int
    pairing_deg: Fraction
    chi: int
    D_cartier: bool
    K_cartier: bool

    @property
    def lhs(self) -> int:
        return self.h0_D + self.h0_KD

    @property
    def rhs(self) -> Fraction:
        return Fraction(self.pairing_deg) / 2 + self.chi

    @property
    def verdict(self) -> bool:
        return self.lhs >= self.rhs

    @property
    def hypotheses(self) -> bool:
        return self.D_cartier and self.K_cartier

    def summary(self) -> str:
        if self.verdict:
            return "inequality holds"
        if not self.hypotheses:
            return "inequality fails; D or K is not Cartier, so the hypothesis is violated"
        return "inequality fails"


def rr_check(W, D: RidgeDivisor, h0_D: int, h0_KD: int, pairing_deg) -> RRCheck:
    K = canonical_divisor(W)
    return RRCheck(
        D,
        int(h0_D),
        int(h0_KD),
        Fraction(pairing_deg),
        euler_characteristic(W.complex),
        is_cartier(W, D, "integral")[0],
        is_cartier(W, K, "integral")[0],
    )


# -- points ---------------------------------------------------------------------------------


def edge_point(W, edge: str, t) -> RationalPoint:
    """The point at parameter ``t`` from the first vertex of ``edge``."""
    t = Fraction(t)
    return RationalPoint(edge, (1 - t, t))


def height_points(W, edges: Sequence[str], count: int, denom: int) -> List[RationalPoint]:
    """``count`` points at heights ``i / denom`` (``i = 1..count``) on the
    given edges, which must run from height 0 to height 1; edges are used
    round-robin."""
    return [edge_point(W, edges[(i - 1) % len(edges)], Fraction(i, denom)) for i in range(1, count + 1)]


TETRA_RISERS = ("ac", "bd", "ad", "bc")
CYLINDER_RISERS = ("e", "c")
