import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tropx import errors
from tropx.complex_core import (
    Simplex,
    WeakTropicalComplex,
    build_complex,
    canonical_divisor,
    complex_from_vertex_sets,
    euler_characteristic,
    from_degeneration_data,
    inertia,
    is_tropical_complex,
    local_intersection_matrix,
    relabel,
)
from tropx.graph_rank import graph_from_edges
from tropx.surface_lab import make_cylinder, make_square, make_tetrahedron

from conftest import load_complex


def eig_signs(M, tol=1e-9):
    ev = np.linalg.eigvalsh(np.array(M, dtype=float))
    return (int((ev > tol).sum()), int((abs(ev) <= tol).sum()), int((ev < -tol).sum()))


def random_symmetric(rng, n, bound=10):
    M = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            M[i][j] = M[j][i] = rng.randint(-bound, bound)
    return M


# -- construction -------------------------------------------------------------------


def test_vertex_order_and_faces():
    cx = complex_from_vertex_sets(2, ["abc"])
    assert cx["abc"].faces == ("bc", "ac", "ab")
    assert cx.vertices("abc") == ("a", "b", "c")
    assert cx.vertices("ac") == ("a", "c")


def test_distinct_simplices_on_one_vertex_set():
    # two edges between the same pair of vertices, as on a circle of circumference 2
    cx = build_complex(1, [("u", 0, ()), ("w", 0, ()), ("e", 1, ("w", "u")), ("f", 1, ("u", "w"))])
    assert set(cx.vertices("e")) == set(cx.vertices("f"))
    assert cx.degree("u") == 2


@pytest.mark.parametrize(
    "records, exc",
    [
        ([("a", 0, ()), ("a", 0, ())], errors.DuplicateId),
        ([("a", 0, ()), ("e", 1, ("a", "b"))], errors.MissingFace),
        ([("a", 0, ()), ("e", 1, ("a", "a"))], errors.NonRegular),
        ([("a", 0, ()), ("b", 0, ())], errors.Disconnected),
        ([("a", 0, ()), ("b", 0, ()), ("t", 2, ("a", "b", "a"))], errors.MissingFace),
    ],
)
def test_build_errors(records, exc):
    with pytest.raises(exc):
        build_complex(2, records)


def test_inconsistent_face_maps():
    recs = [Simplex(v, 0) for v in "abc"]
    recs += [Simplex("ab", 1, ("b", "a")), Simplex("bc", 1, ("c", "b")), Simplex("ac", 1, ("c", "a"))]
    recs += [Simplex("t", 2, ("bc", "ab", "ac"))]
    with pytest.raises(errors.InconsistentFaces):
        build_complex(2, recs)


def test_dimension_exceeded():
    with pytest.raises(errors.DimensionExceeded):
        build_complex(1, [("a", 0, ()), ("b", 0, ()), ("c", 0, ()), ("ab", 1, ("b", "a")),
                          ("bc", 1, ("c", "b")), ("ac", 1, ("c", "a")), ("t", 2, ("bc", "ac", "ab"))])


# -- ridge identity -------------------------------------------------------------------


def test_ridge_identity_enforced():
    cx = make_tetrahedron().complex
    alpha = {(r, p): 1 for r in cx.ridges for p in range(2)}
    alpha[("ab", 0)] = 2
    with pytest.raises(errors.RidgeIdentityViolated) as info:
        WeakTropicalComplex(cx, alpha)
    assert info.value.ridges == ["ab"]


def test_graph_constants_filled_and_checked():
    G = graph_from_edges([("a", "b"), ("b", "c"), ("c", "a"), ("a", "b")])
    assert G.alpha_vector("a") == [3] and G.alpha_vector("c") == [2]
    with pytest.raises(errors.RidgeIdentityViolated):
        WeakTropicalComplex(G.complex, {("a", 0): 2})


def test_bad_ridge_fixture_rejected():
    with pytest.raises(errors.RidgeIdentityViolated):
        load_complex("bad-ridge.json")


def test_from_degeneration_data():
    cx = make_tetrahedron().complex
    W = from_degeneration_data(cx, {(r, p): -1 for r in cx.ridges for p in range(2)})
    assert set(W.alpha.values()) == {1}
    with pytest.raises(errors.RidgeIdentityViolated):
        from_degeneration_data(cx, {(r, p): -2 for r in cx.ridges for p in range(2)})
    G = graph_from_edges([("a", "b"), ("b", "c")])
    ok = {(v, 0): -G.complex.degree(v) for v in G.complex.ridges}
    assert from_degeneration_data(G.complex, ok).alpha_vector("b") == [2]
    ok[("b", 0)] = -1
    with pytest.raises(errors.RidgeIdentityViolated):
        from_degeneration_data(G.complex, ok)


# -- local intersection matrices and inertia ------------------------------------------


def test_tetrahedron_local_matrices():
    W = make_tetrahedron()
    for q in W.complex.vertex_ids:
        M = local_intersection_matrix(W, q)
        assert M.as_lists() == [[-1, 1, 1], [1, -1, 1], [1, 1, -1]]
        t = inertia(M.matrix)
        assert (t.n_plus, t.n_zero, t.n_minus) == (1, 0, 2)


def test_inertia_examples():
    t = inertia([[0, 1], [1, 0]])
    assert (t.n_plus, t.n_zero, t.n_minus) == (1, 0, 1)
    t = inertia([[0, 0], [0, 0]])
    assert (t.n_plus, t.n_zero, t.n_minus) == (0, 2, 0)
    with pytest.raises(errors.NotSymmetric):
        inertia([[1, 2], [3, 4]])


@pytest.mark.parametrize("trial", range(40))
def test_inertia_matches_eigensolver(trial, seed):
    rng = random.Random(seed * 101 + trial)
    n = rng.randint(1, 8)
    M = random_symmetric(rng, n)
    t = inertia(M)
    assert (t.n_plus, t.n_zero, t.n_minus) == eig_signs(M)


def test_inertia_singular_rank_one():
    v = [1, -2, 3, 0, 5]
    M = [[a * b for b in v] for a in v]
    t = inertia(M)
    assert (t.n_plus, t.n_zero, t.n_minus) == (1, 4, 0)


tetra_alpha = st.lists(st.sampled_from([(0, 2), (1, 1), (2, 0)]), min_size=6, max_size=6)


@given(tetra_alpha)
def test_local_matrix_symmetric_with_nonpositive_diagonal(pairs):
    cx = make_tetrahedron().complex
    alpha = {}
    for r, (a0, a1) in zip(cx.ridges, pairs):
        alpha[(r, 0)], alpha[(r, 1)] = a0, a1
    W = WeakTropicalComplex(cx, alpha)
    for q in cx.vertex_ids:
        M = local_intersection_matrix(W, q).as_lists()
        assert M == [list(r) for r in zip(*M)]
        assert all(M[i][i] <= 0 for i in range(len(M)))


@given(tetra_alpha, st.randoms(use_true_random=False))
def test_tropicality_invariant_under_relabeling(pairs, rnd):
    cx = make_tetrahedron().complex
    alpha = {}
    for r, (a0, a1) in zip(cx.ridges, pairs):
        alpha[(r, 0)], alpha[(r, 1)] = a0, a1
    W = WeakTropicalComplex(cx, alpha)
    ids = [s.id for s in cx]
    new = ids[:]
    rnd.shuffle(new)
    mapping = {a: "x" + b for a, b in zip(ids, new)}
    assert bool(is_tropical_complex(W)) == bool(is_tropical_complex(relabel(W, mapping)))


def test_tropicality_of_examples():
    assert is_tropical_complex(make_tetrahedron())
    assert is_tropical_complex(make_cylinder((0, 0, 0, 0)))
    G = graph_from_edges([("a", "b")])
    assert is_tropical_complex(G).ok  # vacuous in dimension one


def test_non_tropical_tetrahedron():
    cx = make_tetrahedron().complex
    alpha = {(r, p): 1 for r in cx.ridges for p in range(2)}
    for r in ("ab", "ac", "ad"):
        # the diagonal at q = a reads alpha at the far endpoint
        p = cx.vertices(r).index("a")
        alpha[(r, p)], alpha[(r, 1 - p)] = 0, 2
    rep = is_tropical_complex(WeakTropicalComplex(cx, alpha))
    assert not rep.ok and "a" in rep.failing


# -- canonical divisor and Euler characteristic --------------------------------------------


def test_canonical_divisor_examples():
    assert canonical_divisor(make_tetrahedron()).is_zero()
    F = load_complex("two-triangles.json")
    K = canonical_divisor(F)
    shared = [r for r in F.complex.ridges if F.complex.degree(r) == 2]
    assert len(shared) == 1 and K[shared[0]] == 0
    assert sorted(K.coeffs.values()) == [-1] * 4
    C4 = graph_from_edges([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    assert canonical_divisor(C4).is_zero()


@pytest.mark.parametrize("name", ["tetrahedron.json", "two-triangles.json", "square.json",
                                  "cylinder-calibrated.json", "k4.json"])
def test_canonical_degree(name):
    W = load_complex(name)
    cx = W.complex
    K = canonical_divisor(W)
    assert sum(K.coeffs.values()) == sum(cx.degree(r) - 2 for r in cx.ridges)
    assert K.is_zero() == all(cx.degree(r) == 2 for r in cx.ridges)


def test_euler_characteristic():
    assert euler_characteristic(make_tetrahedron().complex) == 2
    assert euler_characteristic(make_cylinder((0, 0, 0, 0)).complex) == 0
    assert euler_characteristic(complex_from_vertex_sets(2, ["abc"])) == 1
    assert euler_characteristic(make_square().complex) == 1
