"""Hot inner loops, each with a numba and a pure-numpy implementation.

The numba versions are used unless ``CRANGE_DISABLE_NUMBA=1`` is set in the
environment (or numba is missing).  Both paths compute identical results;
``benchmarks/bench_kernels.py`` compares their speed.
"""
from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("CRANGE_DISABLE_NUMBA", "").lower() not in ("1", "true", "yes")

__all__ = [
    "USE_NUMBA",
    "trace_points",
    "rasterize",
    "star_visible",
    "star_any",
    "winding_angle",
    "min_segment_distance",
]


# ---------------------------------------------------------------- trace points


def trace_points_numpy(us, c, a):
    """z_k = tr(C^dagger U_k A U_k^dagger) for a stack of unitaries."""
    m = us @ a @ np.conj(np.swapaxes(us, -1, -2))
    return np.einsum("kij,ij->k", m, np.conj(c))


def _trace_points_loop(us, c, a):
    count, n = us.shape[0], us.shape[1]
    cc = np.conj(c)
    out = np.empty(count, dtype=np.complex128)
    tmp = np.empty((n, n), dtype=np.complex128)
    for k in range(count):
        u = us[k]
        # tmp = U A
        for i in range(n):
            for j in range(n):
                s = 0j
                for l in range(n):
                    s += u[i, l] * a[l, j]
                tmp[i, j] = s
        # sum_ij conj(C_ij) (U A U^dagger)_ij
        z = 0j
        for i in range(n):
            for j in range(n):
                s = 0j
                for l in range(n):
                    s += tmp[i, l] * np.conj(u[j, l])
                z += cc[i, j] * s
        out[k] = z
    return out


# ---------------------------------------------------------------- rasterize


def rasterize_numpy(x, y, x0, y0, dx, dy, m):
    """Boolean m x m occupancy; cell (i, j) holds row i along y, column j along x."""
    j = np.clip(np.floor((x - x0) / dx).astype(np.int64), 0, m - 1)
    i = np.clip(np.floor((y - y0) / dy).astype(np.int64), 0, m - 1)
    occ = np.zeros((m, m), dtype=np.bool_)
    occ[i, j] = True
    return occ


def _rasterize_loop(x, y, x0, y0, dx, dy, m):
    occ = np.zeros((m, m), dtype=np.bool_)
    for k in range(x.shape[0]):
        j = int(np.floor((x[k] - x0) / dx))
        i = int(np.floor((y[k] - y0) / dy))
        j = min(max(j, 0), m - 1)
        i = min(max(i, 0), m - 1)
        occ[i, j] = True
    return occ


# ---------------------------------------------------------------- star visibility
#
# Cell (i, j) covers [i, i+1) x [j, j+1) in grid units; the center is a
# continuous point (fi, fj).  An occupied cell sees the center iff every
# sample (spacing 1/2 cell) of the straight segment from its center to
# (fi, fj) falls in a cell of ``reach``, a tolerance-dilated copy of the
# occupancy (``reach = occ`` gives the strict test).


def _segment_clear(reach, i, j, fi, fj):
    m = reach.shape[0]
    si = i + 0.5
    sj = j + 0.5
    di = fi - si
    dj = fj - sj
    steps = int(np.ceil(2.0 * np.sqrt(di * di + dj * dj))) + 1
    for t in range(steps + 1):
        f = t / steps
        a = min(max(int(np.floor(si + f * di)), 0), m - 1)
        b = min(max(int(np.floor(sj + f * dj)), 0), m - 1)
        if not reach[a, b]:
            return False
    return True


def _make_star_visible(segment_clear):
    def star_visible_loop(occ, reach, fi, fj):
        m = occ.shape[0]
        ci = min(max(int(np.floor(fi)), 0), m - 1)
        cj = min(max(int(np.floor(fj)), 0), m - 1)
        if not occ[ci, cj]:
            return False
        for i in range(m):
            for j in range(m):
                if occ[i, j] and not segment_clear(reach, i, j, fi, fj):
                    return False
        return True

    return star_visible_loop


def _make_star_any(visible):
    def star_any_loop(occ, reach):
        m = occ.shape[0]
        for ci in range(m):
            for cj in range(m):
                if occ[ci, cj] and visible(occ, reach, ci + 0.5, cj + 0.5):
                    return ci * m + cj
        return -1

    return star_any_loop


star_visible_numpy = _make_star_visible(_segment_clear)
star_visible_numpy.__doc__ = "True iff every occupied cell sees the point (fi, fj) within ``reach``."
star_any_numpy = _make_star_any(star_visible_numpy)
star_any_numpy.__doc__ = "Flat index of the first occupied cell whose center sees every occupied cell, or -1."


# ---------------------------------------------------------------- winding


def winding_angle_numpy(re, im, z0re, z0im):
    """Total signed angle swept by the closed polyline around z0."""
    z = (re - z0re) + 1j * (im - z0im)
    return float(np.sum(np.angle(np.roll(z, -1) / z)))


def _winding_angle_loop(re, im, z0re, z0im):
    n = re.shape[0]
    total = 0.0
    for k in range(n):
        k1 = (k + 1) % n
        ax, ay = re[k] - z0re, im[k] - z0im
        bx, by = re[k1] - z0re, im[k1] - z0im
        total += np.arctan2(ax * by - ay * bx, ax * bx + ay * by)
    return total


def min_segment_distance_numpy(re, im, z0re, z0im):
    """Distance from z0 to the closed polyline."""
    ax, ay = re, im
    bx, by = np.roll(re, -1), np.roll(im, -1)
    vx, vy = bx - ax, by - ay
    wx, wy = z0re - ax, z0im - ay
    den = vx * vx + vy * vy
    t = np.where(den > 0, (wx * vx + wy * vy) / np.where(den > 0, den, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    px, py = ax + t * vx - z0re, ay + t * vy - z0im
    return float(np.sqrt(np.min(px * px + py * py)))


def _min_segment_distance_loop(re, im, z0re, z0im):
    n = re.shape[0]
    best = np.inf
    for k in range(n):
        k1 = (k + 1) % n
        vx, vy = re[k1] - re[k], im[k1] - im[k]
        wx, wy = z0re - re[k], z0im - im[k]
        den = vx * vx + vy * vy
        t = 0.0
        if den > 0:
            t = (wx * vx + wy * vy) / den
            t = min(max(t, 0.0), 1.0)
        px, py = re[k] + t * vx - z0re, im[k] + t * vy - z0im
        d = px * px + py * py
        if d < best:
            best = d
    return np.sqrt(best)


if HAVE_NUMBA:
    trace_points_numba = njit(cache=True)(_trace_points_loop)
    rasterize_numba = njit(cache=True)(_rasterize_loop)
    winding_angle_numba = njit(cache=True)(_winding_angle_loop)
    min_segment_distance_numba = njit(cache=True)(_min_segment_distance_loop)
    _segment_clear_numba = njit(cache=True)(_segment_clear)
    star_visible_numba = njit(_make_star_visible(_segment_clear_numba))
    star_any_numba = njit(_make_star_any(star_visible_numba))


def _pick(name):
    if USE_NUMBA:
        return globals()[name + "_numba"]
    return globals()[name + "_numpy"]


def trace_points(us, c, a):
    us = np.ascontiguousarray(us, dtype=np.complex128)
    c = np.ascontiguousarray(c, dtype=np.complex128)
    a = np.ascontiguousarray(a, dtype=np.complex128)
    return _pick("trace_points")(us, c, a)


def rasterize(x, y, x0, y0, dx, dy, m):
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    return _pick("rasterize")(x, y, float(x0), float(y0), float(dx), float(dy), int(m))


def star_visible(occ, reach, fi, fj):
    occ = np.ascontiguousarray(occ, dtype=np.bool_)
    reach = np.ascontiguousarray(reach, dtype=np.bool_)
    return bool(_pick("star_visible")(occ, reach, float(fi), float(fj)))


def star_any(occ, reach):
    occ = np.ascontiguousarray(occ, dtype=np.bool_)
    reach = np.ascontiguousarray(reach, dtype=np.bool_)
    return int(_pick("star_any")(occ, reach))


def winding_angle(re, im, z0re, z0im):
    re = np.ascontiguousarray(re, dtype=np.float64)
    im = np.ascontiguousarray(im, dtype=np.float64)
    return float(_pick("winding_angle")(re, im, float(z0re), float(z0im)))


def min_segment_distance(re, im, z0re, z0im):
    re = np.ascontiguousarray(re, dtype=np.float64)
    im = np.ascontiguousarray(im, dtype=np.float64)
    return float(_pick("min_segment_distance")(re, im, float(z0re), float(z0im)))
