"""The five worked examples as data plus small runners."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import convex_hull, disc_diagnostic, occupancy_grid, polygon_area, star_center, star_shaped_test
from .groups import GroupSpec, parse_group
from .linalg import kron_all, matrix_unit
from .numrange import RangeCloud, sample_range, support_points

__all__ = ["Example", "example", "example_cloud", "example5_data", "DEFAULT_SAMPLES"]

DEFAULT_SAMPLES = {1: 10_000, 2: 50_000, 3: 100_000}
OMEGA3 = np.exp(2j * np.pi / 3)


@dataclass(frozen=True, eq=False)
class Example:
    number: int
    c: np.ndarray
    a: np.ndarray
    spec: GroupSpec


def example(k: int) -> Example:
    """Matrices and group of worked example ``k`` (1 to 4)."""
    if k == 1:
        e = matrix_unit(2, 2, 1)
        return Example(1, e, e, parse_group("torus(1,-1)"))
    if k == 2:
        e11 = matrix_unit(2, 1, 1)
        a = np.kron(np.diag([1.0, -1.0]), np.diag([1 + 1j, 1 - 1j]))
        return Example(2, np.kron(e11, e11), a, parse_group("prod(u(2),u(2))"))
    if k == 3:
        e11 = matrix_unit(2, 1, 1)
        a1 = np.diag([1.0, OMEGA3])
        return Example(3, kron_all(e11, e11, e11), kron_all(a1, a1, a1), parse_group("prod(prod(u(2),u(2)),u(2))"))
    if k == 4:
        a = matrix_unit(4, 2, 1) + matrix_unit(4, 3, 1) + matrix_unit(4, 4, 1)
        return Example(4, a, a, parse_group("loc(2)"))
    raise ValueError(f"no worked example {k} with a range cloud (choose 1-4)")


def example5_data(a: float = 1.0, b: float = 1.0):
    """(A, U0, Omega0) with U0 = exp(Omega0) and U0 A U0^dagger = -A."""
    mat = np.array([[a, b], [b, -a]], dtype=complex)
    j = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
    return mat, j, 0.5 * np.pi * j


def example_cloud(k: int, samples: int | None = None, seed: int = 0, support: bool = True) -> RangeCloud:
    """Haar sample of example ``k``; for example 3, ascent support points are appended.

    The triangle corners are reached with vanishing probability by uniform
    sampling, so the outer boundary comes from directional ascent.
    """
    ex = example(k)
    count = DEFAULT_SAMPLES.get(k, 10_000) if samples is None else samples
    cloud = sample_range(ex.c, ex.a, ex.spec, count, seed)
    if k == 3 and support:
        sp = support_points(ex.c, ex.a, ex.spec, directions=48, starts=2, seed=seed)
        cloud = RangeCloud(
            np.concatenate([cloud.points, sp.points]),
            ex.spec,
            seed,
            cloud.bound,
            cloud.c_hash,
            cloud.a_hash,
            meta={"samples": count, "support_points": sp.count},
        )
    return cloud


def summarize(cloud: RangeCloud, grid: int = 128) -> dict:
    pts = cloud.points
    hull = convex_hull(pts)
    g = occupancy_grid(pts, grid)
    rep = disc_diagnostic(pts)
    out = {
        "count": cloud.count,
        "min_modulus": float(np.abs(pts).min()),
        "max_modulus": float(np.abs(pts).max()),
        "hull_area": polygon_area(hull),
        "hull_vertices": int(hull.size),
        "occupied_area": g.occupied_area,
        "disc": rep.to_dict(),
        "kind": "estimate",
    }
    if g.contains(0j):
        out["star_shaped_at_origin"] = star_shaped_test(g, 0j)
    out["star_center_found"] = star_center(g) is not None
    return out
