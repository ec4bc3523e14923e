"""Exact integer and rational linear algebra.

Everything here works on plain nested lists of Python ``int`` or
:class:`fractions.Fraction`, so intermediate growth never overflows.
Matrices are lists of rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import List, Sequence

from .errors import DimensionMismatch

Matrix = List[List[int]]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def shape(A: Sequence[Sequence]) -> tuple[int, int]:
    rows = len(A)
    cols = len(A[0]) if rows else 0
    return rows, cols


def matmul(A, B):
    """Product of two list-of-rows matrices (works for ints and Fractions)."""
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    if len(A[0]) != inner:
        raise DimensionMismatch(f"cannot multiply {shape(A)} by {shape(B)}")
    Bt = list(zip(*B)) if cols else []
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A, x):
    if A and len(A[0]) != len(x):
        raise DimensionMismatch(f"matrix {shape(A)} with vector of length {len(x)}")
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def transpose(A):
    return [list(col) for col in zip(*A)]


def bareiss_det(A) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(row) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Rational systems


@dataclass(frozen=True)
class Inconsistent:
    """Certificate that ``A x = b`` has no solution: ``y A = 0`` and ``y b != 0``."""

    certificate: tuple

    def verify(self, A, b) -> bool:
        y = self.certificate
        m, n = shape(A)
        if len(y) != m:
            return False
        yA = [sum(y[i] * A[i][j] for i in range(m)) for j in range(n)]
        yb = sum(yi * bi for yi, bi in zip(y, b))
        return all(v == 0 for v in yA) and yb != 0


def _rref(A, track_rows: bool = False):
    """Reduced row echelon form over Q.

    Returns ``(R, pivots, T)`` with ``T A = R`` when ``track_rows`` is set.
    """
    m, n = shape(A)
    R = [[Fraction(x) for x in row] for row in A]
    T = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)] if track_rows else None
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        if T is not None:
            T[r], T[p] = T[p], T[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        if T is not None:
            T[r] = [x * inv for x in T[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
                if T is not None:
                    T[i] = [x - f * y for x, y in zip(T[i], T[r])]
        pivots.append(c)
        r += 1
    return R, pivots, T


def rank(A) -> int:
    if not A or not A[0]:
        return 0
    return len(_rref(A)[1])


def solve_rational(A, b):
    """Solve ``A x = b`` exactly over the rationals.

    Returns a list of :class:`~fractions.Fraction` (one particular solution,
    free variables set to zero) or an :class:`Inconsistent` instance whose
    certificate ``y`` satisfies ``y A = 0`` and ``y b != 0``.
    """
    m, n = shape(A)
    if len(b) != m:
        raise DimensionMismatch(f"matrix has {m} rows but right-hand side has {len(b)} entries")
    if m == 0:
        return [Fraction(0)] * (len(A[0]) if A else 0)
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots, T = _rref(aug, track_rows=True)
    if pivots and pivots[-1] == n:
        # the row holding the pivot in the augmented column reads 0 = 1
        row = len(pivots) - 1
        y = T[row]
        den = 1
        for v in y:
            den = den * v.denominator // gcd(den, v.denominator)
        return Inconsistent(tuple(int(v * den) for v in y))
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = R[r][n]
    return x


def rational_left_kernel(A) -> Matrix:
    """Integer basis (primitive rows) of ``{y : y A = 0}``."""
    return integer_kernel_rational(transpose(A)) if A else []


def integer_kernel_rational(A) -> Matrix:
    """Rows spanning ``{x : A x = 0}`` over Q, scaled to primitive integer vectors."""
    m, n = shape(A)
    if n == 0:
        return []
    if m == 0:
        return identity(n)
    R, pivots, _ = _rref(A)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -R[r][f]
        basis.append(_primitive(v))
    return basis


def _primitive(v) -> List[int]:
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints] if g > 1 else ints


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``U A V = S`` with ``S`` diagonal, ``d1 | d2 | ...``, ``U``, ``V`` unimodular."""

    U: Matrix
    S: Matrix
    V: Matrix

    @property
    def diagonal(self) -> List[int]:
        return [self.S[i][i] for i in range(min(shape(self.S)))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    def verify(self, A) -> bool:
        m, n = shape(A)
        if m and n and matmul(matmul(self.U, A), self.V) != self.S:
            return False
        diag = self.diagonal
        for i in range(m):
            for j in range(n):
                if i != j and self.S[i][j] != 0:
                    return False
        nz = [d for d in diag if d != 0]
        if any(d < 0 for d in nz) or any(nz[i + 1] % nz[i] for i in range(len(nz) - 1)):
            return False
        if any(diag[i] == 0 and diag[i + 1] != 0 for i in range(len(diag) - 1)):
            return False
        return abs(bareiss_det(self.U)) == 1 and abs(bareiss_det(self.V)) == 1


def smith_normal_form(A) -> SmithDecomposition:
    """Smith normal form with unimodular transforms.

    Pivoting picks the entry of smallest absolute value in the remaining
    block. The result is checked by multiplication before returning.
    """
    m, n = shape(A)
    S = [[int(x) for x in row] for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (S, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst -= q * row_src
        if q:
            S[dst] = [a - q * b for a, b in zip(S[dst], S[src])]
            U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        if q:
            for M in (S, V):
                for row in M:
                    row[dst] -= q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = S[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            p = S[t][t]
            for i in range(t + 1, m):
                add_row(i, t, S[i][t] // p)
            for j in range(t + 1, n):
                add_col(j, t, S[t][j] // p)
            # pull a smaller remainder into the pivot position if one appeared
            cand = None
            for i in range(t + 1, m):
                if S[i][t] and (cand is None or abs(S[i][t]) < cand[0]):
                    cand = (abs(S[i][t]), "r", i)
            for j in range(t + 1, n):
                if S[t][j] and (cand is None or abs(S[t][j]) < cand[0]):
                    cand = (abs(S[t][j]), "c", j)
            if cand is not None:
                if cand[1] == "r":
                    swap_rows(t, cand[2])
                else:
                    swap_cols(t, cand[2])
                continue
            bad = next(
                (i for i in range(t + 1, m) if any(S[i][j] % p for j in range(t + 1, n))),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, -1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]

    dec = SmithDecomposition(U, S, V)
    if m and n and matmul(matmul(U, A), V) != S:
        raise AssertionError("Smith normal form failed its own verification")
    return dec


@dataclass(frozen=True)
class AbelianGroupPresentation:
    """Finitely generated abelian group ``Z^free_rank + sum Z/d``."""

    free_rank: int
    invariant_factors: tuple = field(default_factory=tuple)

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def is_cyclic_free(self) -> bool:
        return self.free_rank == 1 and not self.invariant_factors

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.invariant_factors]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "invariant_factors": list(self.invariant_factors)}


def cokernel(A, rows: int | None = None) -> AbelianGroupPresentation:
    """Presentation of ``Z^rows / image(A)``.

    ``rows`` is only needed for matrices with no columns given as ``[]``.
    """
    m = len(A) if rows is None else rows
    if m == 0:
        return AbelianGroupPresentation(0, ())
    if not A or not A[0]:
        return AbelianGroupPresentation(m, ())
    diag = smith_normal_form(A).diagonal
    nz = [d for d in diag if d]
    return AbelianGroupPresentation(m - len(nz), tuple(d for d in nz if d > 1))


def integer_kernel(A) -> Matrix:
    """Rows forming a Z-basis of ``{x in Z^n : A x = 0}``."""
    m, n = shape(A)
    if n == 0:
        return []
    if m == 0:
        return identity(n)
    dec = smith_normal_form(A)
    r = dec.rank
    return [[dec.V[i][j] for i in range(n)] for j in range(r, n)]


def saturate(L) -> Matrix:
    """Basis (rows) of ``{x in Z^n : k x in rowspan(L) for some k > 0}``."""
    if not L:
        return []
    m, n = shape(L)
    if n == 0:
        return []
    # rowspan(L) tensor Q equals the span of the first r rows of V^-1
    dec = smith_normal_form(L)
    r = dec.rank
    Vinv = _unimodular_inverse(dec.V)
    return [list(Vinv[i]) for i in range(r)]


def _unimodular_inverse(V) -> Matrix:
    n = len(V)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(V)]
    R, pivots, _ = _rref(aug)
    inv = [[int(x) for x in row[n:]] for row in R]
    return inv


def solve_integer(A, b):
    """An integer solution of ``A x = b`` or ``None``."""
    m, n = shape(A)
    if len(b) != m:
        raise DimensionMismatch(f"matrix has {m} rows but right-hand side has {len(b)} entries")
    if n == 0:
        return [] if all(v == 0 for v in b) else None
    dec = smith_normal_form(A)
    c = matvec(dec.U, b)
    y = [0] * n
    for i in range(m):
        d = dec.S[i][i] if i < n else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d:
                return None
            y[i] = c[i] // d
    return matvec(dec.V, y)


def in_lattice(basis, v) -> bool:
    """Whether ``v`` is an integer combination of the rows of ``basis``."""
    if not basis:
        return all(x == 0 for x in v)
    return solve_integer(transpose(basis), list(v)) is not None


def lattice_index(sub, sup) -> int:
    """Index of the row lattice ``sub`` inside ``sup`` (same rank required)."""
    coords = []
    for row in sub:
        x = solve_integer(transpose(sup), row)
        if x is None:
            raise ValueError("sub is not contained in sup")
        coords.append(x)
    g = cokernel(transpose(coords))
    if g.free_rank:
        raise ValueError("lattices have different rank")
    return g.torsion_order


# ---------------------------------------------------------------------------
# Characteristic polynomials


def charpoly(M) -> List[int]:
    """Coefficients of ``det(x I - M)``, highest degree first.

    Berkowitz's division-free recurrence, so integer input stays integer.
    """
    n = len(M)
    p = [1]
    for r in range(n):
        a = M[r][r]
        row = M[r][:r]
        v = [M[i][r] for i in range(r)]
        T = [1, -a]
        for _ in range(r):
            T.append(-sum(x * y for x, y in zip(row, v)))
            v = [sum(M[i][j] * v[j] for j in range(r)) for i in range(r)]
        new = []
        for i in range(r + 2):
            s = 0
            for j in range(len(p)):
                k = i - j
                if 0 <= k < len(T):
                    s += T[k] * p[j]
            new.append(s)
        p = new
    return p


def sign_variations(coeffs) -> int:
    signs = [1 if c > 0 else -1 for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)
