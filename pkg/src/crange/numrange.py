"""Sampling, local ascent and exact special cases of W_K(C, A).

``W_K(C, A) = {tr(C^dagger U A U^dagger) : U in K}``.  General sets are
approximated by Haar sampling (:func:`sample_range`) plus support-function
ascent (:func:`support_points`); Hermitian pairs and structured subgroups
have the exact formulas in :func:`hermitian_interval`, :func:`compose_sum`
and :func:`compose_product`.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config import TOL
from .groups import DirectSum, GroupSpec, Local, TensorProd, algebra_basis, haar_batch
from .linalg import DimensionError, as_matrix, dagger, expm_skew, fro_norm, is_hermitian, is_unitary

__all__ = [
    "RangeCloud",
    "RadiusResult",
    "trace_point",
    "sample_range",
    "support_points",
    "radius",
    "hermitian_interval",
    "compose_sum",
    "compose_product",
    "local_numerical_range",
    "matrix_hash",
    "COMPOSE_CAP",
    "CHUNK",
]

COMPOSE_CAP = 10**6
CHUNK = 4096  # samples per independently seeded chunk


def matrix_hash(a) -> str:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    h = hashlib.sha256()
    h.update(str(a.shape).encode())
    h.update(a.tobytes())
    return h.hexdigest()[:16]


def _text_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class RangeCloud:
    """Finite sample of W_K(C, A).

    ``bound`` is the Cauchy-Schwarz radius ``||A||_F ||C||_F`` every point must
    respect; ``exact`` marks clouds built from exact formulas rather than
    random sampling.
    """

    points: np.ndarray
    spec: GroupSpec | None
    seed: int | None
    bound: float
    c_hash: str = ""
    a_hash: str = ""
    exact: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=complex).ravel())
        if pts.size and np.max(np.abs(pts)) > self.bound + TOL.exact * max(1.0, self.bound):
            raise ValueError("cloud violates the Cauchy-Schwarz bound")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return self.points.size

    def __len__(self):
        return self.points.size


@dataclass(frozen=True, eq=False)
class RadiusResult:
    value: float
    maximizer: np.ndarray
    restarts: int
    converged: bool
    point: complex = 0j
    iterations: int = 0


def _check_pair(c, a, spec: GroupSpec | None = None):
    c, a = as_matrix(c), as_matrix(a)
    if c.shape != a.shape:
        raise DimensionError(f"C is {c.shape[0]}x{c.shape[0]} but A is {a.shape[0]}x{a.shape[0]}")
    if spec is not None and spec.dim != a.shape[0]:
        raise DimensionError(f"group {spec} acts on dimension {spec.dim}, matrices have {a.shape[0]}")
    return c, a


def trace_point(c, a, u) -> complex:
    """tr(C^dagger U A U^dagger)."""
    c, a = _check_pair(c, a)
    u = as_matrix(u, a.shape[0])
    if not is_unitary(u, TOL.exact * max(1.0, a.shape[0])):
        raise ValueError("U is not unitary")
    return complex(np.vdot(c, u @ a @ dagger(u)))


def _chunk_seeds(seed: int, count: int):
    n_chunks = -(-count // CHUNK)
    for k in range(n_chunks):
        size = min(CHUNK, count - k * CHUNK)
        yield np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, k]), size


def sample_range(c, a, spec: GroupSpec, count: int, seed: int = 0) -> RangeCloud:
    """``count`` points tr(C^dagger U A U^dagger) with U Haar-distributed in K.

    Samples are drawn in chunks of :data:`CHUNK`; chunk ``k`` is seeded from
    ``(seed, k)`` so chunks can be produced independently and in any order.
    """
    c, a = _check_pair(c, a, spec)
    if count < 1:
        raise ValueError("count must be positive")
    parts = []
    for ss, size in _chunk_seeds(seed, count):
        us = haar_batch(spec, size, ss)
        parts.append(_kernels.trace_points(us, c, a))
    return RangeCloud(
        np.concatenate(parts),
        spec,
        int(seed),
        fro_norm(a) * fro_norm(c),
        matrix_hash(c),
        matrix_hash(a),
    )


# ---------------------------------------------------------------- local ascent


def _ascent(objective_grad, u0, basis, max_iter: int, gtol: float):
    """Riemannian conjugate-gradient ascent along geodesics exp(t B) U.

    ``objective_grad(U)`` returns ``(f, g)`` where ``g`` holds the directional
    derivatives along the (orthonormal) algebra basis.  Directions are combined
    in this fixed frame (Polak-Ribiere+, reset to the gradient whenever the
    direction stops ascending); steps satisfy the Armijo condition.
    Convergence is ``||g|| <= gtol * max(1, |f|)``.
    """
    u = u0
    f, g = objective_grad(u)
    d = g
    step = 1.0
    gnorm = float(np.linalg.norm(g))
    it = 0
    for it in range(1, max_iter + 1):
        if gnorm <= gtol * max(1.0, abs(f)):
            return u, f, True, it - 1
        slope = float(g @ d)
        if slope <= 0:
            d, slope = g, gnorm**2
        direction = basis.combine(d)
        t = step
        accepted = False
        for _ in range(40):
            cand = expm_skew(direction, t) @ u
            f_new, g_new = objective_grad(cand)
            if f_new >= f + 1e-4 * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if d is not g:
                d, step = g, 1.0
                continue
            # no ascent possible at machine precision: treat as stationary
            return u, f, gnorm <= 1e-6 * max(1.0, abs(f)), it
        beta = max(0.0, float(g_new @ (g_new - g)) / gnorm**2)
        u, f, g = cand, f_new, g_new
        d = g + beta * d
        gnorm = float(np.linalg.norm(g))
        step = min(t * 2.0, 1e3)
    return u, f, gnorm <= gtol * max(1.0, abs(f)), it


def _radius_objective(c, a, basis_el):
    ch = dagger(c)

    def fg(u):
        m = u @ a @ dagger(u)
        z = np.vdot(c, m)
        # d/dt tr(C^dagger [B, M]) = tr(B [M, C^dagger])
        g_mat = m @ ch - ch @ m
        dz = np.einsum("kij,ji->k", basis_el, g_mat)
        g = 2.0 * np.real(np.conj(z) * dz)
        return float(abs(z) ** 2), g

    return fg


def radius(
    c,
    a,
    spec: GroupSpec,
    restarts: int = 16,
    seed: int = 0,
    max_iter: int = 500,
    gtol: float = 1e-8,
) -> RadiusResult:
    """Estimate r_K(C, A) = max |tr(C^dagger U A U^dagger)| over U in K.

    Gradient ascent of |tr(C^dagger U A U^dagger)|^2 from the identity and
    ``restarts - 1`` Haar-random starts; the best local maximum is returned.
    """
    c, a = _check_pair(c, a, spec)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    n = a.shape[0]
    basis = algebra_basis(spec).orthonormal()
    fg = _radius_objective(c, a, basis.elements)
    starts = [np.eye(n, dtype=complex)]
    if restarts > 1:
        starts.extend(haar_batch(spec, restarts - 1, seed))
    best = None
    total_it = 0
    for u0 in starts:
        u, f, conv, it = _ascent(fg, u0, basis, max_iter, gtol)
        total_it += it
        if best is None or f > best[1] + 1e-14 * max(1.0, f):
            best = (u, f, conv)
    u, f, conv = best
    z = complex(np.vdot(c, u @ a @ dagger(u)))
    return RadiusResult(abs(z), u, restarts, bool(conv), z, total_it)


def support_points(
    c, a, spec: GroupSpec, directions: int = 64, starts: int = 4, seed: int = 0, max_iter: int = 200
) -> RangeCloud:
    """Boundary points of W_K(C, A) found by maximizing Re(e^{-i theta} z).

    For each of ``directions`` equally spaced angles theta, a few ascents are
    run and the best local maximizer kept.  The points lie in W_K(C, A); when
    the ascent reaches the global maximum they are support points of its
    convex hull.
    """
    c, a = _check_pair(c, a, spec)
    basis = algebra_basis(spec).orthonormal()
    el = basis.elements
    ch = dagger(c)
    pts = []
    us0 = haar_batch(spec, directions * starts, seed)
    for d in range(directions):
        w = np.exp(-1j * 2.0 * np.pi * d / directions)

        def fg(u, w=w):
            m = u @ a @ dagger(u)
            z = np.vdot(c, m)
            dz = np.einsum("kij,ji->k", el, m @ ch - ch @ m)
            return float(np.real(w * z)), np.real(w * dz)

        best = None
        for s in range(starts):
            u, f, _, _ = _ascent(fg, us0[d * starts + s], basis, max_iter, 1e-9)
            if best is None or f > best[1]:
                best = (u, f)
        pts.append(np.vdot(c, best[0] @ a @ dagger(best[0])))
    return RangeCloud(np.array(pts), spec, int(seed), fro_norm(a) * fro_norm(c), matrix_hash(c), matrix_hash(a))


# ---------------------------------------------------------------- exact cases


def hermitian_interval(c, a) -> tuple[float, float]:
    """Endpoints (a, b) of W(C, A) for Hermitian C, A (von Neumann pairing)."""
    c, a = _check_pair(c, a)
    if not (is_hermitian(c, TOL.exact * max(1.0, fro_norm(c))) and is_hermitian(a, TOL.exact * max(1.0, fro_norm(a)))):
        raise ValueError("hermitian_interval requires Hermitian C and A")
    alpha = np.sort(np.linalg.eigvalsh(a))[::-1]
    gamma = np.sort(np.linalg.eigvalsh(c))[::-1]
    hi = float(np.dot(alpha, gamma))
    lo = float(np.dot(alpha, gamma[::-1]))
    return lo, hi


def _pair_indices(n1: int, n2: int, cap: int):
    if n1 * n2 <= cap:
        i, j = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
        return i.ravel(), j.ravel()
    # stratified: evenly spaced index subsets whose cross product fits the cap
    k1 = int(min(n1, max(1, round(np.sqrt(cap * n1 / n2)))))
    k2 = int(min(n2, max(1, cap // k1)))
    s1 = np.unique(np.linspace(0, n1 - 1, k1).round().astype(np.int64))
    s2 = np.unique(np.linspace(0, n2 - 1, k2).round().astype(np.int64))
    i, j = np.meshgrid(s1, s2, indexing="ij")
    return i.ravel(), j.ravel()


def _merge_meta(w1: RangeCloud, w2: RangeCloud, spec, points, bound, op):
    seed = None if w1.seed is None or w2.seed is None else int(w1.seed) ^ (int(w2.seed) << 1)
    return RangeCloud(
        points,
        spec,
        seed,
        bound,
        _text_hash(w1.c_hash + op + w2.c_hash),
        _text_hash(w1.a_hash + op + w2.a_hash),
        exact=w1.exact and w2.exact,
        meta={"op": op},
    )


def compose_sum(w1: RangeCloud, w2: RangeCloud, cap: int = COMPOSE_CAP) -> RangeCloud:
    """Minkowski sum of two clouds (direct-sum subgroup with block-diagonal C, A)."""
    if len(w1) == 0 or len(w2) == 0:
        raise ValueError("clouds must be nonempty")
    i, j = _pair_indices(len(w1), len(w2), cap)
    spec = DirectSum(w1.spec, w2.spec) if w1.spec is not None and w2.spec is not None else None
    return _merge_meta(w1, w2, spec, w1.points[i] + w2.points[j], w1.bound + w2.bound, "+")


def compose_product(w1: RangeCloud, w2: RangeCloud, cap: int = COMPOSE_CAP) -> RangeCloud:
    """Set product of two clouds (tensor-product subgroup with product C, A)."""
    if len(w1) == 0 or len(w2) == 0:
        raise ValueError("clouds must be nonempty")
    i, j = _pair_indices(len(w1), len(w2), cap)
    spec = TensorProd(w1.spec, w2.spec) if w1.spec is not None and w2.spec is not None else None
    return _merge_meta(w1, w2, spec, w1.points[i] * w2.points[j], w1.bound * w2.bound, "*")


def local_numerical_range(a, n: int, count: int, seed: int = 0) -> RangeCloud:
    """Sample x^dagger A x over product unit vectors x = x_1 (x) ... (x) x_n."""
    a = as_matrix(a)
    if a.shape[0] != 2**n:
        raise DimensionError(f"A has dimension {a.shape[0]}, expected 2**{n}")
    if count < 1:
        raise ValueError("count must be positive")
    parts = []
    for ss, size in _chunk_seeds(seed, count):
        rng = np.random.default_rng(ss)
        x = np.ones((size, 1), dtype=complex)
        for _ in range(n):
            v = rng.standard_normal((size, 2)) + 1j * rng.standard_normal((size, 2))
            v /= np.linalg.norm(v, axis=1, keepdims=True)
            x = np.einsum("ki,kj->kij", x, v).reshape(size, -1)
        parts.append(np.einsum("ki,ij,kj->k", np.conj(x), a, x))
    # x^dagger A x = tr(xx^dagger A): the C = xx^dagger bound is ||A||_F
    return RangeCloud(np.concatenate(parts), Local(n), int(seed), fro_norm(a), "", matrix_hash(a))
