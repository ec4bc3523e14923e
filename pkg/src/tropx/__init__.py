"""Exact divisor theory on tropical complexes."""

from .complex_core import (
    DeltaComplex,
    InertiaTriple,
    LocalIntersectionMatrix,
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
    validate_ridge_identity,
)
from .divisors import (
    PLFunction,
    RationalPoint,
    RidgeDivisor,
    assemble_specialization,
    class_group,
    div_pl,
    is_cartier,
    is_cartier_at,
    is_weil,
    lin_equiv,
    weil_lattice,
)
from .exact_linalg import AbelianGroupPresentation, cokernel, saturate, smith_normal_form, solve_rational
from .subdivision import promote_point, subdivide, transfer_pl

__version__ = "0.1.0"
