import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tropx import errors
from tropx.complex_core import complex_from_vertex_sets, WeakTropicalComplex
from tropx.divisors import (
    LinearEquivalenceCertificate,
    NotFoundUpTo,
    PLFunction,
    RationalPoint,
    RidgeDivisor,
    assemble_specialization,
    class_group,
    div_matrix,
    div_pl,
    is_cartier,
    is_cartier_at,
    is_weil,
    lin_equiv,
    weil_lattice,
)
from tropx.exact_linalg import bareiss_det, saturate, smith_normal_form
from tropx.graph_rank import graph_from_edges, laplacian
from tropx.subdivision import subdivide
from tropx.surface_lab import (
    cylinder_generator,
    cylinder_top,
    make_cylinder,
    make_square,
    make_tetrahedron,
    square_intersections,
)

from conftest import load_complex
from test_exact_linalg import invariant_factors_by_minors

T = make_tetrahedron()
values = st.integers(-6, 6)


def pl(W, vals):
    return PLFunction(W, dict(zip(W.complex.vertex_ids, vals)))


def single_triangle():
    cx = complex_from_vertex_sets(2, ["abc"])
    return WeakTropicalComplex(cx, {(r, p): int(p == 0) for r in cx.ridges for p in range(2)})


# -- div_pl -----------------------------------------------------------------------------


@pytest.mark.parametrize("v", "abcd")
def test_tetrahedron_vertex_indicator(v):
    D = div_pl(T, PLFunction(T, {v: 1}))
    for r in T.complex.ridges:
        assert D[r] == (-1 if v in T.complex.vertices(r) else 1)


def test_graph_divisor_is_laplacian():
    G = graph_from_edges([("a", "b"), ("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    L = laplacian(G)
    vs = G.complex.vertex_ids
    rng = random.Random(3)
    for _ in range(20):
        x = [rng.randint(-5, 5) for _ in vs]
        D = div_pl(G, pl(G, x))
        assert D.vector() == [-sum(L[i][j] * x[j] for j in range(len(vs))) for i in range(len(vs))]


@pytest.mark.parametrize("name", ["tetrahedron.json", "square.json", "cylinder-calibrated.json",
                                  "two-triangles.json", "k4.json"])
def test_constants_have_trivial_divisor(name):
    W = load_complex(name)
    assert div_pl(W, pl(W, [7] * len(W.complex.vertex_ids))).is_zero()


@given(st.lists(values, min_size=4, max_size=4), st.lists(values, min_size=4, max_size=4), st.integers(-4, 4))
def test_div_is_linear(x, y, c):
    lhs = div_pl(T, pl(T, [a + b for a, b in zip(x, y)]))
    assert lhs == div_pl(T, pl(T, x)) + div_pl(T, pl(T, y))
    assert div_pl(T, pl(T, [c * a for a in x])) == c * div_pl(T, pl(T, x))


def test_non_integral_slopes_rejected():
    with pytest.raises(errors.NonIntegralSlopes):
        div_pl(T, PLFunction(T, {"a": Fraction(1, 2)}))


def test_facetless_ridge_rule():
    # a triangle with a dangling edge: the dangling edge is a facetless ridge... of dimension one
    cx = complex_from_vertex_sets(2, ["abc", "cd"])
    alpha = {(r, p): 0 for r in cx.ridges for p in range(2)}
    for r in ("ab", "bc", "ac"):
        alpha[(r, 0)] = 1
    alpha[("cd", 0)], alpha[("cd", 1)] = 2, -2
    W = WeakTropicalComplex(cx, alpha)
    D = div_pl(W, PLFunction(W, {"c": 1, "d": 3}))
    assert D["cd"] == -(2 * 1 + (-2) * 3)


# -- specialization -----------------------------------------------------------------------


def test_assemble_specialization():
    assert assemble_specialization(T, {}).is_zero()
    assert assemble_specialization(T, {"ab": 2}) == RidgeDivisor(T, {"ab": 2})
    with pytest.raises(errors.UnknownRidgeId):
        assemble_specialization(T, {"zz": 1})
    S = make_square()
    D = assemble_specialization(S, square_intersections(S))
    assert sorted(D.coeffs.values()) == [-1, 1, 1, 1, 1]
    assert not D.is_effective()


# -- Cartier / Weil -----------------------------------------------------------------------


@given(st.lists(values, min_size=4, max_size=4))
def test_principal_divisors_are_cartier_and_weil(x):
    D = div_pl(T, pl(T, x))
    assert is_cartier(T, D)[0]
    assert is_weil(T, D).ok


def test_any_coefficient_cartier_along_ridge_interior():
    for c in (-3, 1, 5):
        D = RidgeDivisor(T, {"ab": c})
        mid = RationalPoint("ab", (Fraction(1, 2), Fraction(1, 2)))
        assert is_cartier_at(T, D, mid).ok
        assert is_cartier_at(T, D, RationalPoint("abc", (Fraction(1, 3),) * 3)).ok


def test_half_divisor_is_q_cartier_not_cartier():
    half = RidgeDivisor(T, {"ab": 1})
    ok, failing = is_cartier(T, half)
    assert not ok and set(failing) == {"a", "b"}
    assert is_cartier_at(T, half, RationalPoint("a", (1,)), "rational").ok
    assert is_cartier(T, 2 * half)[0]


def test_graph_divisors_all_weil():
    G = graph_from_edges([("a", "b"), ("b", "c"), ("c", "a")])
    assert is_weil(G, RidgeDivisor(G, {"a": 5, "c": -2})).ok
    assert len(weil_lattice(G)) == 3


def test_tetrahedron_weil_lattice_brute_force():
    L = weil_lattice(T)
    assert saturate(L) and len(L) == 6
    full = all(is_weil(T, RidgeDivisor(T, dict(zip(T.complex.ridges, v)))).ok
               for v in itertools.product(range(-2, 3), repeat=6))
    assert full


def test_cylinder_weil_lattice():
    C = make_cylinder((0, 0, 0, 0))
    L = weil_lattice(C)
    assert len(L) == 4
    # saturated: the maximal minors have gcd 1
    assert smith_normal_form(L).diagonal == [1, 1, 1, 1]
    assert all(is_weil(C, RidgeDivisor(C, dict(zip(C.complex.ridges, row)))).ok for row in L)
    assert not is_weil(C, RidgeDivisor(C, {"d": 1})).ok


# -- class groups -------------------------------------------------------------------------


def test_cycle_class_group():
    C4 = graph_from_edges([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    g = class_group(C4)
    assert (g.free_rank, g.invariant_factors) == (1, (4,))


def test_single_triangle_class_group():
    W = single_triangle()
    A = div_matrix(W)
    g = class_group(W)
    nz = invariant_factors_by_minors(A)
    assert g.free_rank == 3 - len(nz)
    assert list(g.invariant_factors) == [d for d in nz if d > 1]


def spanning_tree_count(G):
    L = laplacian(G)
    return bareiss_det([row[1:] for row in L[1:]])


@pytest.mark.parametrize("edges", [
    [("a", "b")],
    [("a", "b"), ("a", "b"), ("a", "b")],
    [("a", "b"), ("b", "c"), ("c", "a")],
    [(x, y) for i, x in enumerate("abcd") for y in "abcd"[i + 1:]],
    [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "f"), ("f", "a"), ("a", "d")],
    [("a", "b"), ("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"), ("d", "e")],
])
def test_graph_class_group_matrix_tree(edges):
    G = graph_from_edges(edges)
    g = class_group(G)
    assert g.free_rank == 1
    assert g.torsion_order == spanning_tree_count(G)


def test_cylinder_weil_class_group_is_z():
    g = class_group(make_cylinder((0, 0, 0, 0)), "weil")
    assert g.is_cyclic_free()


# -- linear equivalence ---------------------------------------------------------------------


def test_equal_divisors_equivalent_at_order_one():
    D = RidgeDivisor(T, {"ab": 2, "cd": -1})
    cert = lin_equiv(D, D, 1)
    assert cert.order == 1 and cert.verify()
    assert all(v == 0 for v in cert.phi.values.values())


def test_cylinder_equivalence():
    C = make_cylinder((0, 0, 0, 0))
    cert = lin_equiv(cylinder_top(C), 2 * cylinder_generator(C), 2)
    assert isinstance(cert, LinearEquivalenceCertificate) and cert.verify()


def test_twice_edge_equivalent_to_mid_cycle():
    W2, smap = subdivide(T, 2)
    mid = []
    for r in W2.complex.ridges:
        h = smap.host[r]
        if h not in T.complex.facets:
            continue
        vs = T.complex.vertices(h)
        if all(sum(x for v, x in zip(vs, p) if v in "ab") == Fraction(1, 2) for p in smap.point(r)):
            mid.append(r)
    assert len(mid) == 4
    cycle = RidgeDivisor(W2, {r: 1 for r in mid}, 2)
    cert = lin_equiv(RidgeDivisor(T, {"ab": 2}), cycle, 2)
    assert cert and cert.order == 2 and cert.verify()
    assert not lin_equiv(RidgeDivisor(T, {"ab": 2}), cycle, 1)


def test_bounded_negative():
    res = lin_equiv(RidgeDivisor(T, {"ab": 1}), RidgeDivisor(T, {}), 2)
    assert isinstance(res, NotFoundUpTo) and res.max_order == 2


def test_tampered_certificate_fails():
    D = RidgeDivisor(T, {"ab": 2})
    Dp = RidgeDivisor(T, {"cd": 2})
    cert = lin_equiv(D, Dp, 1)
    assert cert.verify()
    bad = LinearEquivalenceCertificate(cert.order, cert.phi, D, RidgeDivisor(T, {"cd": 1}))
    assert not bad.verify()
