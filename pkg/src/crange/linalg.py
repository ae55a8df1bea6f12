"""Dense complex linear algebra primitives.

Matrices are plain ``numpy`` complex arrays of shape ``(N, N)``; the helpers
here validate shapes and implement the handful of operations the rest of the
package is built from (commutators, the adjoint operator, Kronecker products,
direct sums, exponentials of skew-Hermitian matrices).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import TOL

__all__ = [
    "BlockPartition",
    "DimensionError",
    "as_matrix",
    "matrix_unit",
    "dagger",
    "fro_norm",
    "is_hermitian",
    "is_skew_hermitian",
    "is_unitary",
    "is_traceless",
    "frobenius_inner",
    "commutator",
    "ad_operator",
    "kron",
    "kron_all",
    "direct_sum",
    "expm_skew",
    "is_nilpotent",
    "kron_factors",
    "realify",
]


class DimensionError(ValueError):
    """Raised when matrix shapes are incompatible."""


@dataclass(frozen=True)
class BlockPartition:
    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s <= 0 for s in sizes):
            raise ValueError(f"block sizes must be positive, got {self.sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def dim(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(np.concatenate([[0], np.cumsum(self.sizes)]).tolist())

    def labels(self) -> np.ndarray:
        """Block index of every row/column."""
        return np.repeat(np.arange(len(self.sizes)), self.sizes)


def as_matrix(x, n: int | None = None) -> np.ndarray:
    a = np.asarray(x, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise DimensionError(f"expected dimension {n}, got {a.shape[0]}")
    return a


def _same_dims(*mats):
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(shapes)}")


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    """E_ij with 1-based indices."""
    e = np.zeros((n, n), dtype=complex)
    e[i - 1, j - 1] = 1.0
    return e


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def fro_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def is_hermitian(a, tol: float = TOL.exact) -> bool:
    a = as_matrix(a)
    return fro_norm(a - dagger(a)) <= tol


def is_skew_hermitian(a, tol: float = TOL.exact) -> bool:
    a = as_matrix(a)
    return fro_norm(a + dagger(a)) <= tol


def is_unitary(a, tol: float = TOL.exact) -> bool:
    a = as_matrix(a)
    return fro_norm(dagger(a) @ a - np.eye(a.shape[0])) <= tol


def is_traceless(a, tol: float = TOL.exact) -> bool:
    return abs(np.trace(as_matrix(a))) <= tol


def frobenius_inner(c, a) -> complex:
    """tr(C^dagger A)."""
    c, a = as_matrix(c), as_matrix(a)
    _same_dims(c, a)
    return complex(np.vdot(c, a))


def commutator(x, y) -> np.ndarray:
    x, y = as_matrix(x), as_matrix(y)
    _same_dims(x, y)
    return x @ y - y @ x


def ad_operator(omega) -> np.ndarray:
    """Matrix of A -> [omega, A] acting on row-major vec(A)."""
    omega = as_matrix(omega)
    eye = np.eye(omega.shape[0])
    return np.kron(omega, eye) - np.kron(eye, omega.T)


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(*mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def direct_sum(a, b) -> np.ndarray:
    return scipy.linalg.block_diag(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def expm_skew(omega, t: float = 1.0, tol: float = TOL.exact) -> np.ndarray:
    """exp(t * omega) for skew-Hermitian omega via eigh of i*omega.

    The result is unitary up to rounding since the spectral factors are.
    """
    omega = as_matrix(omega)
    if not is_skew_hermitian(omega, tol * max(1.0, fro_norm(omega))):
        raise ValueError("expm_skew requires a skew-Hermitian matrix")
    h = 1j * omega
    w, v = np.linalg.eigh(0.5 * (h + dagger(h)))
    # omega = -i h  =>  exp(t omega) = V diag(exp(-i t w)) V^dagger
    return (v * np.exp(-1j * t * w)) @ dagger(v)


def is_nilpotent(a, tol: float = TOL.nilp) -> bool:
    """Nilpotency by staircase deflation.

    Repeatedly split off the numerical kernel of the current compression
    (singular values below ``tol * ||A||``); A is nilpotent iff this reaches
    dimension zero. Unlike eigenvalue moduli this is insensitive to the
    eps**(1/k) splitting of k x k Jordan blocks.
    """
    a = as_matrix(a)
    scale = fro_norm(a)
    if scale == 0.0:
        return True
    cur = a / scale
    while cur.shape[0] > 0:
        u, s, vh = np.linalg.svd(cur)
        null = int(np.sum(s <= tol))
        if null == 0:
            return False
        # columns of V beyond the rank span ker(cur); compress onto the rest
        rank = cur.shape[0] - null
        q = dagger(vh)[:, :rank]
        cur = dagger(q) @ cur @ q
    return True


def kron_factors(u, dims: tuple[int, int]) -> tuple[np.ndarray, np.ndarray, float]:
    """Best Kronecker factorization u ~ a (x) b via realignment.

    Returns ``(a, b, residual)`` with ``residual`` the Frobenius distance of
    ``kron(a, b)`` from ``u``; a zero residual certifies a product.
    """
    u = as_matrix(u)
    d1, d2 = dims
    if d1 * d2 != u.shape[0]:
        raise DimensionError(f"{dims} does not factor dimension {u.shape[0]}")
    r = u.reshape(d1, d2, d1, d2).transpose(0, 2, 1, 3).reshape(d1 * d1, d2 * d2)
    uu, s, vh = np.linalg.svd(r)
    a = (uu[:, 0] * np.sqrt(s[0])).reshape(d1, d1)
    b = (vh[0] * np.sqrt(s[0])).reshape(d2, d2)
    return a, b, fro_norm(kron(a, b) - u)


def realify(mats) -> np.ndarray:
    """Stack matrices as columns of real vectors (Re, Im) for real-linear solves."""
    mats = np.asarray(mats, dtype=complex)
    flat = mats.reshape(mats.shape[0], -1)
    return np.concatenate([flat.real, flat.imag], axis=1).T
