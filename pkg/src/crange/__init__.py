"""Relative C-numerical ranges W_K(C, A) = {tr(C^dagger U A U^dagger) : U in K}.

Sampling and local ascent for the set and its radius, exact Lie-algebraic
decisions for rotational symmetry of K-orbits, and the local-unitary case
analysis for two and three qubits.
"""
from .config import TOL, Tolerances
from .geometry import convex_hull, disc_diagnostic, occupancy_grid, star_shaped_test, winding_number
from .groups import algebra_basis, haar_batch, haar_sample, parse_group, torus_basis
from .linalg import BlockPartition, DimensionError
from .local import classify_4x4, conjecture_check, perm_group_ex, tloc_feasibility
from .numrange import (
    compose_product,
    compose_sum,
    hermitian_interval,
    local_numerical_range,
    radius,
    sample_range,
    support_points,
    trace_point,
)
from .symmetry import blockshift_canonical, detect_weak_symmetry, eigenspace_basis, separation_index

__version__ = "0.1.0"

__all__ = [
    "TOL",
    "Tolerances",
    "BlockPartition",
    "DimensionError",
    "parse_group",
    "algebra_basis",
    "torus_basis",
    "haar_batch",
    "haar_sample",
    "trace_point",
    "sample_range",
    "support_points",
    "radius",
    "hermitian_interval",
    "compose_sum",
    "compose_product",
    "local_numerical_range",
    "detect_weak_symmetry",
    "eigenspace_basis",
    "blockshift_canonical",
    "separation_index",
    "tloc_feasibility",
    "classify_4x4",
    "perm_group_ex",
    "conjecture_check",
    "convex_hull",
    "winding_number",
    "occupancy_grid",
    "star_shaped_test",
    "disc_diagnostic",
]
