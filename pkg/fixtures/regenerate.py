"""Rebuild the JSON fixtures in this directory: ``python fixtures/regenerate.py``."""

import copy
import os
from fractions import Fraction

from tropx import io
from tropx.complex_core import WeakTropicalComplex, complex_from_vertex_sets
from tropx.divisors import RationalPoint, RidgeDivisor, assemble_specialization
from tropx.graph_rank import canonical_graph_divisor, graph_from_edges
from tropx.surface_lab import (
    cylinder_generator,
    cylinder_top,
    make_cylinder,
    make_square,
    make_tetrahedron,
    square_intersections,
)
from tropx.cli import CYLINDER_NOTE

HERE = os.path.dirname(os.path.abspath(__file__))


def save(name, obj):
    io.write_json(os.path.join(HERE, name), obj)


def two_triangles():
    """Two triangles glued along the edge top-bot; boundary edges carry
    alpha 1 at their end on the shared edge and 0 at the side vertex."""
    cx = complex_from_vertex_sets(2, [("top", "left", "bot"), ("top", "right", "bot")])
    shared = {"top", "bot"}
    alpha = {}
    for r in cx.ridges:
        vs = cx.vertices(r)
        if set(vs) == shared:
            alpha[(r, 0)] = alpha[(r, 1)] = 1
        else:
            for p, v in enumerate(vs):
                alpha[(r, p)] = 1 if v in shared else 0
    return WeakTropicalComplex(cx, alpha)


def main():
    T = make_tetrahedron()
    save("tetrahedron.json", io.complex_to_json(T))
    save("tetra-2ab.json", io.divisor_to_json(RidgeDivisor(T, {"ab": 2})))
    save("tetra-ab.json", io.divisor_to_json(RidgeDivisor(T, {"ab": 1})))
    save("tetra-2cd.json", io.divisor_to_json(RidgeDivisor(T, {"cd": 2})))

    bad = copy.deepcopy(io.complex_to_json(T))
    for a in bad["alpha"]:
        if a["ridge"] == "ab" and a["vertex_pos"] == 0:
            a["value"] = 2
    bad["note"] = "tetrahedron with alpha(a, ab) raised to 2, so the ridge identity fails at ab"
    save("bad-ridge.json", bad)

    C = make_cylinder((0, 0, 0, 0))
    cj = io.complex_to_json(C)
    cj["note"] = CYLINDER_NOTE
    save("cylinder-calibrated.json", cj)
    save("cylinder-top.json", io.divisor_to_json(cylinder_top(C)))
    save("cylinder-2gen.json", io.divisor_to_json(2 * cylinder_generator(C)))

    F = two_triangles()
    save("two-triangles.json", io.complex_to_json(F))

    S = make_square()
    sj = io.complex_to_json(S)
    sj["note"] = "unit square cut along p00-p11, constants from the toric degeneration of P1 x P1"
    save("square.json", sj)
    save("square-ruling.json", io.divisor_to_json(assemble_specialization(S, square_intersections(S))))

    K4 = graph_from_edges([(a, b) for i, a in enumerate("abcd") for b in "abcd"[i + 1:]])
    save("k4.json", io.complex_to_json(K4))
    save("k4-canonical.json", io.divisor_to_json(canonical_graph_divisor(K4).to_ridge_divisor()))
    C4 = graph_from_edges([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    save("cycle4.json", io.complex_to_json(C4))
    save("cycle4-4c.json", io.divisor_to_json(RidgeDivisor(C4, {"c": 4})))
    save("cycle4-mid.json", io.points_to_json([RationalPoint("e0", (Fraction(1, 2), Fraction(1, 2)))]))


if __name__ == "__main__":
    main()
