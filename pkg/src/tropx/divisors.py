"""Ridge divisors, PL functions and their divisors, local Cartier tests,
Weil lattices, class groups and linear equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from . import errors
from .complex_core import WeakTropicalComplex
from .exact_linalg import (
    AbelianGroupPresentation,
    Inconsistent,
    cokernel,
    identity,
    integer_kernel,
    rational_left_kernel,
    saturate,
    solve_integer,
    solve_rational,
    transpose,
)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Mapping):
        return Fraction(int(x["num"]), int(x.get("den", 1)))
    if isinstance(x, float):
        raise TypeError("floating-point coefficients are not accepted; use Fraction or {num, den}")
    return Fraction(x)


class RidgeDivisor:
    """Finite formal sum of ridges of ``host`` with rational coefficients.

    ``order`` records which subdivision of the base complex ``host`` is
    (1 for the base itself).
    """

    __slots__ = ("host", "coeffs", "order")

    def __init__(self, host: WeakTropicalComplex, coeffs: Mapping[str, object] | None = None, order: int = 1):
        self.host = host
        self.order = order
        clean: Dict[str, Fraction] = {}
        ridges = set(host.complex.ridges)
        for r, c in (coeffs or {}).items():
            if r not in ridges:
                raise errors.UnknownRidgeId(f"{r!r} is not a ridge of the host complex")
            c = _frac(c)
            if c:
                clean[r] = clean.get(r, Fraction(0)) + c
        self.coeffs = {r: c for r, c in clean.items() if c}

    def __getitem__(self, ridge) -> Fraction:
        return self.coeffs.get(ridge, Fraction(0))

    def _check_same(self, other):
        if other.host is not self.host:
            raise errors.DimensionMismatch("divisors live on different complexes")

    def __add__(self, other):
        self._check_same(other)
        c = dict(self.coeffs)
        for r, v in other.coeffs.items():
            c[r] = c.get(r, 0) + v
        return RidgeDivisor(self.host, c, self.order)

    def __neg__(self):
        return RidgeDivisor(self.host, {r: -v for r, v in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k):
        k = _frac(k)
        return RidgeDivisor(self.host, {r: k * v for r, v in self.coeffs.items()}, self.order)

    __mul__ = __rmul__

    def __eq__(self, other):
        return isinstance(other, RidgeDivisor) and other.host is self.host and other.coeffs == self.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "RidgeDivisor(0)"
        terms = " + ".join(f"{v}[{r}]" for r, v in self.items())
        return f"RidgeDivisor({terms})"

    def items(self):
        order = self.host.complex
        return sorted(self.coeffs.items(), key=lambda kv: order.index(kv[0]))

    def vector(self) -> List[Fraction]:
        return [self[r] for r in self.host.complex.ridges]

    def int_vector(self) -> List[int]:
        if not self.is_integral():
            raise errors.NonIntegralDivisor(f"{self!r} has non-integer coefficients")
        return [int(v) for v in self.vector()]

    @property
    def support(self) -> List[str]:
        return [r for r, _ in self.items()]

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.coeffs.values())

    def is_effective(self) -> bool:
        return all(v >= 0 for v in self.coeffs.values())


class PLFunction:
    """Vertex values on ``host``, interpreted as linear on every simplex."""

    __slots__ = ("host", "values", "order")

    def __init__(self, host: WeakTropicalComplex, values: Mapping[str, object] | None = None, order: int = 1):
        self.host = host
        self.order = order
        verts = host.complex.vertex_ids
        given = {str(k): _frac(v) for k, v in (values or {}).items()}
        unknown = set(given) - set(verts)
        if unknown:
            raise errors.FormatError(f"values given for non-vertices {sorted(unknown)[:5]}")
        self.values = {v: given.get(v, Fraction(0)) for v in verts}

    def __getitem__(self, v) -> Fraction:
        return self.values[v]

    def __add__(self, other):
        return PLFunction(self.host, {v: x + other.values[v] for v, x in self.values.items()}, self.order)

    def __rmul__(self, k):
        return PLFunction(self.host, {v: k * x for v, x in self.values.items()}, self.order)

    def has_integral_slopes(self) -> bool:
        cx = self.host.complex
        for e in cx.simplices(1):
            a, b = cx.vertices(e)
            if (self.values[a] - self.values[b]).denominator != 1:
                return False
        return True


def div_pl(W: WeakTropicalComplex, phi: PLFunction, check: bool = True) -> RidgeDivisor:
    """Divisor of a simplexwise-linear function.

    The coefficient at ``r`` is the sum of ``phi`` at the vertices opposite
    ``r`` in its facets, minus ``sum alpha(v, r) phi(v)``. On a ridge in no
    facet only the second sum survives.
    """
    if phi.host is not W:
        raise errors.DimensionMismatch("function lives on a different complex")
    if check and not phi.has_integral_slopes():
        raise errors.NonIntegralSlopes("vertex values differ by non-integers on some simplex")
    cx = W.complex
    coeffs = {}
    for r in cx.ridges:
        total = Fraction(0)
        for f, i in cx.cofaces(r):
            if cx.dim(f) == cx.n:
                total += phi.values[cx.vertices(f)[i]]
        for p, v in enumerate(cx.vertices(r)):
            total -= W.alpha[(r, p)] * phi.values[v]
        coeffs[r] = total
    return RidgeDivisor(W, coeffs, phi.order)


def div_matrix(W: WeakTropicalComplex) -> List[List[int]]:
    """Integer matrix with rows indexed by ridges and columns by vertices;
    column ``v`` is the divisor of the indicator function of ``v``."""
    cx = W.complex
    vidx = {v: j for j, v in enumerate(cx.vertex_ids)}
    M = [[0] * len(vidx) for _ in cx.ridges]
    for i, r in enumerate(cx.ridges):
        for f, k in cx.cofaces(r):
            if cx.dim(f) == cx.n:
                M[i][vidx[cx.vertices(f)[k]]] += 1
        for p, v in enumerate(cx.vertices(r)):
            M[i][vidx[v]] -= W.alpha[(r, p)]
    return M


def assemble_specialization(W: WeakTropicalComplex, intersections: Mapping[str, int]) -> RidgeDivisor:
    """Coarse specialization ``sum deg(D . C_r) [r]`` from an intersection table."""
    ridges = set(W.complex.ridges)
    for r in intersections:
        if r not in ridges:
            raise errors.UnknownRidgeId(f"{r!r} is not a ridge")
    return RidgeDivisor(W, {r: int(x) for r, x in intersections.items()})


# ---------------------------------------------------------------------------
# Local systems


@dataclass(frozen=True)
class LocalSystem:
    """Linear map from local vertex values near ``sigma`` to divisor
    coefficients on the ridges through ``sigma``.

    Variables are the vertices of ``sigma`` followed by one value per
    simplex of dimension ``dim(sigma) + 1`` containing ``sigma`` (its vertex
    off ``sigma``). Copies of a vertex reached through different such
    simplices are independent, as they are in the open star.
    """

    sigma: str
    variables: Tuple[str, ...]
    ridges: Tuple[str, ...]
    matrix: Tuple[Tuple[int, ...], ...]


def local_system(W: WeakTropicalComplex, sigma: str) -> LocalSystem:
    cx = W.complex
    k = cx.dim(sigma)
    sverts = cx.vertices(sigma)
    cont = dict(cx.containing(sigma))
    nbrs = [s for s in cont if cx.dim(s) == k + 1]
    variables = [("v", p) for p in range(k + 1)] + [("s", s) for s in nbrs]
    index = {v: i for i, v in enumerate(variables)}

    def var_for(simplex, pos):
        # local variable for vertex ``pos`` of ``simplex`` (which contains sigma)
        spos = cont[simplex]
        if pos in spos:
            return index[("v", spos.index(pos))]
        return index[("s", cx.face(simplex, list(spos) + [pos]))]

    ridges = [s for s in cont if cx.dim(s) == cx.n - 1]
    rows = []
    for r in ridges:
        row = [0] * len(variables)
        for f, i in cx.cofaces(r):
            if cx.dim(f) == cx.n:
                row[var_for(f, i)] += 1
        for p in range(cx.n):
            row[var_for(r, p)] -= W.alpha[(r, p)]
        rows.append(tuple(row))
    names = tuple(sverts[x] if t == "v" else x for t, x in variables)
    return LocalSystem(sigma, names, tuple(ridges), tuple(rows))


@dataclass(frozen=True)
class RationalPoint:
    """Point of a simplex given by barycentric coordinates (in vertex order)."""

    simplex: str
    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(_frac(c) for c in self.coords))
        if any(c < 0 for c in self.coords) or sum(self.coords) != 1:
            raise errors.PointOutsideComplex(f"barycentric coordinates {self.coords} are not a point of the simplex")

    def support(self) -> List[int]:
        return [i for i, c in enumerate(self.coords) if c != 0]


def minimal_simplex(W: WeakTropicalComplex, p: RationalPoint) -> str:
    cx = W.complex
    if p.simplex not in cx:
        raise errors.PointOutsideComplex(f"unknown simplex {p.simplex!r}")
    if len(p.coords) != cx.dim(p.simplex) + 1:
        raise errors.PointOutsideComplex(f"{p.simplex!r} needs {cx.dim(p.simplex) + 1} coordinates")
    return cx.face(p.simplex, p.support())


@dataclass
class CartierResult:
    ok: bool
    sigma: str
    certificate: Optional[Dict[str, Fraction]] = None

    def __bool__(self):
        return self.ok


def is_cartier_at(W: WeakTropicalComplex, D: RidgeDivisor, p, mode: str = "integral") -> CartierResult:
    """Whether ``D`` is locally the divisor of a PL function near ``p``.

    ``p`` is a :class:`RationalPoint` or a simplex id (meaning its interior).
    ``mode`` is ``"integral"`` (Cartier) or ``"rational"`` (Q-Cartier). The
    witnesses searched are functions linear on each simplex of the star of
    the smallest simplex containing ``p``.
    """
    if mode not in ("integral", "rational"):
        raise ValueError(f"unknown mode {mode!r}")
    sigma = p if isinstance(p, str) else minimal_simplex(W, p)
    if sigma not in W.complex:
        raise errors.PointOutsideComplex(f"unknown simplex {sigma!r}")
    ls = local_system(W, sigma)
    if not ls.ridges:
        return CartierResult(True, sigma, {})
    b = [D[r] for r in ls.ridges]
    A = [list(row) for row in ls.matrix]
    if mode == "integral":
        if any(x.denominator != 1 for x in b):
            return CartierResult(False, sigma)
        x = solve_integer(A, [int(v) for v in b])
        if x is None:
            return CartierResult(False, sigma)
    else:
        x = solve_rational(A, b)
        if isinstance(x, Inconsistent):
            return CartierResult(False, sigma)
    return CartierResult(True, sigma, {f"{i}:{name}": Fraction(v) for i, (name, v) in enumerate(zip(ls.variables, x))})


def is_cartier(W: WeakTropicalComplex, D: RidgeDivisor, mode: str = "integral") -> Tuple[bool, List[str]]:
    """Cartier (or Q-Cartier) everywhere; the local test only depends on the
    open simplex containing a point, so one check per simplex suffices."""
    failing = [s for s in W.complex.simplices() if not is_cartier_at(W, D, s, mode)]
    return (not failing, failing)


def _facetless_obstructions(W: WeakTropicalComplex) -> List[str]:
    cx = W.complex
    return [r for r in cx.ridges if cx.degree(r) == 0 and all(a == 0 for a in W.alpha_vector(r))]


@dataclass
class WeilReport:
    ok: bool
    failing: List[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def is_weil(W: WeakTropicalComplex, D: RidgeDivisor) -> WeilReport:
    """Q-Cartier at every (n-2)-simplex, plus the facetless-ridge condition."""
    failing = []
    if W.n >= 2:
        for q in W.complex.simplices(W.n - 2):
            if not is_cartier_at(W, D, q, "rational"):
                failing.append(q)
    for r in _facetless_obstructions(W):
        if D[r] != 0:
            failing.append(r)
    return WeilReport(not failing, failing)


def weil_constraints(W: WeakTropicalComplex) -> List[List[int]]:
    """Integer rows ``c`` with ``c . a = 0`` for exactly the Weil coefficient vectors ``a``."""
    cx = W.complex
    ridx = {r: i for i, r in enumerate(cx.ridges)}
    rows = []
    if W.n >= 2:
        for q in cx.simplices(W.n - 2):
            ls = local_system(W, q)
            for y in rational_left_kernel([list(r) for r in ls.matrix]):
                row = [0] * len(ridx)
                for r, c in zip(ls.ridges, y):
                    row[ridx[r]] += c
                if any(row):
                    rows.append(row)
    for r in _facetless_obstructions(W):
        row = [0] * len(ridx)
        row[ridx[r]] = 1
        rows.append(row)
    return rows


def weil_lattice(W: WeakTropicalComplex) -> List[List[int]]:
    """Basis (rows, in ridge order) of the lattice of integral Weil divisors."""
    R = len(W.complex.ridges)
    C = weil_constraints(W)
    if not C:
        return identity(R)
    basis = integer_kernel(C)
    return saturate(basis) if basis else []


def class_group(W: WeakTropicalComplex, restrict: str = "all") -> AbelianGroupPresentation:
    """Ridge divisors (or Weil ridge divisors) modulo divisors of functions
    linear on each simplex."""
    P = div_matrix(W)
    R = len(W.complex.ridges)
    if restrict == "all":
        return cokernel(P, rows=R)
    if restrict != "weil":
        raise ValueError(f"restrict must be 'all' or 'weil', not {restrict!r}")
    L = weil_lattice(W)
    if not L:
        return AbelianGroupPresentation(0, ())
    Lt = transpose(L)
    coords = []
    for col in transpose(P):
        x = solve_integer(Lt, col)
        if x is None:
            raise AssertionError("a principal divisor is not Weil; local systems are inconsistent")
        coords.append(x)
    return cokernel(transpose(coords), rows=len(L))


# ---------------------------------------------------------------------------
# Linear equivalence


@dataclass
class LinearEquivalenceCertificate:
    """``D - D' = div(phi)`` with ``phi`` on the order-``order`` subdivision."""

    order: int
    phi: PLFunction
    D: RidgeDivisor
    Dprime: RidgeDivisor

    def verify(self) -> bool:
        from .subdivision import refine_divisor

        W = self.phi.host
        lhs = refine_divisor(self.D, self.order) - refine_divisor(self.Dprime, self.order)
        return lhs.host is W and div_pl(W, self.phi) == lhs


@dataclass(frozen=True)
class NotFoundUpTo:
    max_order: int

    def __bool__(self):
        return False


def lin_equiv(D: RidgeDivisor, Dprime: RidgeDivisor, max_order: int = 1):
    """Search subdivision orders ``1..max_order`` for ``phi`` with
    ``D - D' = div(phi)``.

    Both divisors must live on the same base complex or on subdivisions of
    it. Returns a :class:`LinearEquivalenceCertificate` for the lowest order
    that works, or :class:`NotFoundUpTo`.
    """
    from .subdivision import base_of, refine_divisor, subdivide

    base = base_of(D)
    if base_of(Dprime) is not base:
        raise errors.DimensionMismatch("divisors are not on a common base complex")
    for m in range(1, max_order + 1):
        if m % D.order or m % Dprime.order:
            continue
        Wm, _ = subdivide(base, m)
        diff = refine_divisor(D, m) - refine_divisor(Dprime, m)
        if not diff.is_integral():
            continue
        x = solve_integer(div_matrix(Wm), diff.int_vector())
        if x is None:
            continue
        phi = PLFunction(Wm, dict(zip(Wm.complex.vertex_ids, x)), order=m)
        cert = LinearEquivalenceCertificate(m, phi, D, Dprime)
        if not cert.verify():
            raise AssertionError("linear equivalence certificate failed re-verification")
        return cert
    return NotFoundUpTo(max_order)
