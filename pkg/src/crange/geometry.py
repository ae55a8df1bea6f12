"""Planar post-processing of range clouds.

Everything here works on finite point sets in the complex plane.  Shape
properties that are only meaningful for the underlying continuum set
(star-shapedness, holes) are judged on occupancy grids and are diagnostics
of the sample, not proofs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import binary_closing, binary_dilation
from scipy.spatial import cKDTree

from . import _kernels

__all__ = [
    "convex_hull",
    "polygon_area",
    "in_convex_polygon",
    "winding_number",
    "OccupancyGrid",
    "occupancy_grid",
    "hausdorff",
    "DiscReport",
    "disc_diagnostic",
    "scale_set",
    "star_shaped_test",
    "star_center",
    "write_svg",
]


def _as_points(points) -> np.ndarray:
    pts = np.asarray(getattr(points, "points", points), dtype=complex).ravel()
    if pts.size == 0:
        raise ValueError("point set is empty")
    return pts


def _cross(o, a, b):
    return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)


def convex_hull(points) -> np.ndarray:
    """Counterclockwise hull vertices (monotone chain), collinear points dropped.

    The first vertex is the lexicographically smallest (re, im) point.
    """
    pts = _as_points(points)
    pts = np.unique(pts)  # complex sort is lexicographic in (re, im)
    if pts.size <= 2:
        return pts
    lower: list[complex] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[complex] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def polygon_area(vertices) -> float:
    v = np.asarray(vertices, dtype=complex)
    if v.size < 3:
        return 0.0
    w = np.roll(v, -1)
    return float(0.5 * np.sum(v.real * w.imag - w.real * v.imag))


def in_convex_polygon(hull, points, tol: float = 1e-12) -> np.ndarray:
    """Membership of points in a counterclockwise convex polygon (boundary included)."""
    h = np.asarray(hull, dtype=complex)
    pts = np.asarray(points, dtype=complex).ravel()
    if h.size == 1:
        return np.abs(pts - h[0]) <= tol
    if h.size == 2:
        d = h[1] - h[0]
        t = np.clip(np.real((pts - h[0]) * np.conj(d)) / abs(d) ** 2, 0.0, 1.0)
        return np.abs(h[0] + t * d - pts) <= tol
    a = h[None, :]
    b = np.roll(h, -1)[None, :]
    p = pts[:, None]
    cr = (b.real - a.real) * (p.imag - a.imag) - (b.imag - a.imag) * (p.real - a.real)
    scale = max(1.0, float(np.max(np.abs(h))))
    return np.all(cr >= -tol * scale * np.abs(b - a), axis=1)


def winding_number(path, z0: complex, min_distance: float = 1e-12) -> int:
    """Winding number of the closed polyline ``path`` (last point joins the first) around z0."""
    p = np.asarray(path, dtype=complex).ravel()
    if p.size < 2:
        raise ValueError("path needs at least two points")
    z0 = complex(z0)
    if _kernels.min_segment_distance(p.real, p.imag, z0.real, z0.imag) <= min_distance:
        raise ValueError("z0 lies on the path")
    ang = _kernels.winding_angle(p.real, p.imag, z0.real, z0.imag)
    return int(round(ang / (2.0 * np.pi)))


# ---------------------------------------------------------------- grids


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    """m x m boolean raster of a point set; row i runs along Im, column j along Re."""

    resolution: int
    bounds: tuple[float, float, float, float]  # (re_min, re_max, im_min, im_max)
    cells: np.ndarray
    min_modulus: float
    max_modulus: float

    @property
    def dx(self) -> float:
        return (self.bounds[1] - self.bounds[0]) / self.resolution

    @property
    def dy(self) -> float:
        return (self.bounds[3] - self.bounds[2]) / self.resolution

    def contains(self, z: complex) -> bool:
        x0, x1, y0, y1 = self.bounds
        return x0 <= z.real <= x1 and y0 <= z.imag <= y1

    def cell_of(self, z: complex) -> tuple[int, int]:
        if not self.contains(z):
            raise ValueError(f"{z} lies outside the grid bounds")
        m = self.resolution
        j = min(int(np.floor((z.real - self.bounds[0]) / self.dx)), m - 1)
        i = min(int(np.floor((z.imag - self.bounds[2]) / self.dy)), m - 1)
        return i, j

    def cell_centers(self) -> np.ndarray:
        m = self.resolution
        x = self.bounds[0] + (np.arange(m) + 0.5) * self.dx
        y = self.bounds[2] + (np.arange(m) + 0.5) * self.dy
        return x[None, :] + 1j * y[:, None]

    @property
    def occupied_area(self) -> float:
        return float(self.cells.sum()) * self.dx * self.dy

    def region_occupancy(self, member) -> float:
        """Fraction of cells whose center satisfies ``member`` that are occupied."""
        inside = np.asarray(member(self.cell_centers()), dtype=bool)
        if not inside.any():
            raise ValueError("region contains no cell centers")
        return float(self.cells[inside].mean())


def occupancy_grid(points, resolution: int = 256, bounds=None, close: int = 0) -> OccupancyGrid:
    """Rasterize a cloud; ``close`` > 0 applies that many binary-closing passes."""
    pts = _as_points(points)
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    if bounds is None:
        x0, x1 = float(pts.real.min()), float(pts.real.max())
        y0, y1 = float(pts.imag.min()), float(pts.imag.max())
        pad = 1e-9 * max(1.0, x1 - x0, y1 - y0)
        x0, x1, y0, y1 = x0 - pad, x1 + pad, y0 - pad, y1 + pad
        if x1 - x0 < 1e-12:
            x0, x1 = x0 - 0.5, x1 + 0.5
        if y1 - y0 < 1e-12:
            y0, y1 = y0 - 0.5, y1 + 0.5
    else:
        x0, x1, y0, y1 = (float(b) for b in bounds)
        if pts.real.min() < x0 or pts.real.max() > x1 or pts.imag.min() < y0 or pts.imag.max() > y1:
            raise ValueError("bounds do not contain all points")
    dx, dy = (x1 - x0) / resolution, (y1 - y0) / resolution
    cells = _kernels.rasterize(pts.real, pts.imag, x0, y0, dx, dy, resolution)
    if close > 0:
        cells = cells | binary_closing(cells, iterations=close, border_value=0)
    mod = np.abs(pts)
    return OccupancyGrid(resolution, (x0, x1, y0, y1), cells, float(mod.min()), float(mod.max()))


def _reach(grid: OccupancyGrid, slack: int) -> np.ndarray:
    if slack <= 0:
        return grid.cells
    return binary_dilation(grid.cells, np.ones((3, 3), dtype=bool), iterations=slack)


def star_shaped_test(grid: OccupancyGrid, center: complex, slack: int = 1) -> bool:
    """Discrete visibility of ``center`` from every occupied cell.

    Each straight segment from an occupied cell to the center must stay
    within ``slack`` cells of occupied cells, so isolated sampling holes
    and half-filled cells along boundary rays do not block it.  With
    ``slack=0`` every crossed cell must be occupied.  Resolution dependent.
    """
    z = complex(center)
    if not grid.contains(z):
        raise ValueError(f"{z} lies outside the grid bounds")
    fi = (z.imag - grid.bounds[2]) / grid.dy
    fj = (z.real - grid.bounds[0]) / grid.dx
    return _kernels.star_visible(grid.cells, _reach(grid, slack), fi, fj)


def star_center(grid: OccupancyGrid, slack: int = 1) -> complex | None:
    """Center of some occupied cell passing :func:`star_shaped_test`, or None."""
    flat = _kernels.star_any(grid.cells, _reach(grid, slack))
    if flat < 0:
        return None
    i, j = divmod(flat, grid.resolution)
    return complex(grid.cell_centers()[i, j])


# ---------------------------------------------------------------- diagnostics


def hausdorff(p, q) -> float:
    """Symmetric Hausdorff distance between two finite planar point sets."""
    p, q = _as_points(p), _as_points(q)
    pp = np.column_stack([p.real, p.imag])
    qq = np.column_stack([q.real, q.imag])
    d1 = cKDTree(qq).query(pp)[0].max()
    d2 = cKDTree(pp).query(qq)[0].max()
    return float(max(d1, d2))


def _diameter(pts: np.ndarray) -> float:
    h = convex_hull(pts)
    if h.size == 1:
        return 0.0
    return float(np.max(np.abs(h[:, None] - h[None, :])))


@dataclass(frozen=True)
class DiscReport:
    rotation_invariant: bool
    origin_gap: float
    annulus_suspected: bool
    max_modulus: float
    rotation_error: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def disc_diagnostic(cloud, grid_res: int = 256, thetas=(2 * np.pi / 7, 1.0), rel_tol: float = 0.05) -> DiscReport:
    """Rotation invariance, distance of the cloud from the origin, and annulus suspicion.

    ``grid_res`` snaps points to an m x m grid over the cloud's bounding box
    before comparing rotated copies, which keeps the distance computation
    linear in the number of occupied cells.
    """
    pts = _as_points(cloud)
    mod = np.abs(pts)
    gap, rmax = float(mod.min()), float(mod.max())
    diam = _diameter(pts)
    grid = occupancy_grid(pts, grid_res)
    snapped = grid.cell_centers()[grid.cells]
    err = max(hausdorff(snapped, np.exp(1j * th) * snapped) for th in thetas)
    rot = err <= rel_tol * diam if diam > 0 else True
    return DiscReport(bool(rot), gap, bool(rot and gap > 0.1 * rmax), rmax, float(err))


def scale_set(points, r: float, s: float, samples: int) -> np.ndarray:
    """[r, s] * W on the grid of ``samples`` equally spaced scale factors."""
    if r < 0 or r > s:
        raise ValueError("need 0 <= r <= s")
    if samples < 1:
        raise ValueError("samples must be positive")
    pts = _as_points(points)
    lam = np.linspace(r, s, samples) if samples > 1 else np.array([r])
    return (lam[:, None] * pts[None, :]).ravel()


# ---------------------------------------------------------------- output


def write_svg(path, points, hull=None, size: int = 800, margin: int = 20) -> None:
    """Scatter plot of a cloud: 800 x 800 viewport, 1.5-radius dots, optional hull polyline."""
    pts = _as_points(points)
    x0, x1 = pts.real.min(), pts.real.max()
    y0, y1 = pts.imag.min(), pts.imag.max()
    span = max(x1 - x0, y1 - y0, 1e-12)
    scale = (size - 2 * margin) / span

    def xy(z):
        return margin + (z.real - x0) * scale, size - margin - (z.imag - y0) * scale

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    lines += [f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.5" fill="black"/>' for x, y in map(xy, pts)]
    if hull is not None and len(hull):
        h = np.asarray(hull, dtype=complex)
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(xy, np.append(h, h[0])))
        lines.append(f'<polyline points="{coords}" fill="none" stroke="red" stroke-width="1"/>')
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
