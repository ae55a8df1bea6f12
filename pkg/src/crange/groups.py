"""Compact connected subgroups K of U(N), their Lie algebras and Haar sampling.

A :class:`GroupSpec` is a small algebraic description (full unitary, special
unitary, a one-parameter torus, the local group SU(2)^(x)n, tensor products
and direct sums).  From it we derive a real basis of the Lie algebra, a
diagonal torus algebra, and seeded random group elements.

String grammar (case- and whitespace-insensitive)::

    u(N) | su(N) | torus(a1,...,aN) | loc(n) | sum(S1,S2) | prod(S1,S2)
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import TOL
from .linalg import as_matrix, dagger, direct_sum, fro_norm, is_skew_hermitian, kron, realify

__all__ = [
    "GroupSpec",
    "FullUnitary",
    "SpecialUnitary",
    "Torus",
    "Local",
    "TensorProd",
    "DirectSum",
    "AlgebraBasis",
    "parse_group",
    "algebra_basis",
    "torus_basis",
    "haar_sample",
    "haar_batch",
    "contains_algebra",
    "haar_unitary",
    "PAULI",
]

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class GroupSpec:
    """Base class of the subgroup descriptions."""

    @property
    def dim(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class FullUnitary(GroupSpec):
    n: int

    @property
    def dim(self):
        return self.n

    def __str__(self):
        return f"u({self.n})"


@dataclass(frozen=True)
class SpecialUnitary(GroupSpec):
    n: int

    @property
    def dim(self):
        return self.n

    def __str__(self):
        return f"su({self.n})"


@dataclass(frozen=True)
class Torus(GroupSpec):
    """{diag(exp(i a_1 t), ..., exp(i a_N t))} for integer weights a."""

    weights: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(a) for a in self.weights)
        if not w or all(a == 0 for a in w):
            raise ValueError("torus weights must not all be zero")
        object.__setattr__(self, "weights", w)

    @property
    def dim(self):
        return len(self.weights)

    def __str__(self):
        return "torus(" + ",".join(str(a) for a in self.weights) + ")"


@dataclass(frozen=True)
class Local(GroupSpec):
    """SU(2) (x) ... (x) SU(2), n factors."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("local group needs n >= 1")

    @property
    def dim(self):
        return 2**self.n

    def __str__(self):
        return f"loc({self.n})"


@dataclass(frozen=True)
class TensorProd(GroupSpec):
    left: GroupSpec
    right: GroupSpec

    @property
    def dim(self):
        return self.left.dim * self.right.dim

    def __str__(self):
        return f"prod({self.left},{self.right})"


@dataclass(frozen=True)
class DirectSum(GroupSpec):
    left: GroupSpec
    right: GroupSpec

    @property
    def dim(self):
        return self.left.dim + self.right.dim

    def __str__(self):
        return f"sum({self.left},{self.right})"


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*([a-z]+|-?\d+|[(),])")


def parse_group(text: str) -> GroupSpec:
    """Parse the group grammar into a :class:`GroupSpec`."""
    src = text.lower()
    tokens, pos = [], 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m:
            raise ValueError(f"bad group spec {text!r} at position {pos}")
        tokens.append(m.group(1))
        pos = m.end()

    def expect(tok):
        nonlocal i
        if i >= len(tokens) or tokens[i] != tok:
            raise ValueError(f"bad group spec {text!r}: expected {tok!r}")
        i += 1

    def integer():
        nonlocal i
        if i >= len(tokens) or not re.fullmatch(r"-?\d+", tokens[i]):
            raise ValueError(f"bad group spec {text!r}: expected an integer")
        i += 1
        return int(tokens[i - 1])

    def spec():
        nonlocal i
        if i >= len(tokens):
            raise ValueError(f"bad group spec {text!r}: unexpected end")
        name = tokens[i]
        i += 1
        expect("(")
        if name in ("u", "su", "loc"):
            k = integer()
            if k < 1:
                raise ValueError(f"bad group spec {text!r}: size must be positive")
            out = {"u": FullUnitary, "su": SpecialUnitary, "loc": Local}[name](k)
        elif name == "torus":
            ws = [integer()]
            while i < len(tokens) and tokens[i] == ",":
                i += 1
                ws.append(integer())
            out = Torus(tuple(ws))
        elif name in ("sum", "prod"):
            a = spec()
            expect(",")
            b = spec()
            out = DirectSum(a, b) if name == "sum" else TensorProd(a, b)
        else:
            raise ValueError(f"bad group spec {text!r}: unknown group {name!r}")
        expect(")")
        return out

    i = 0
    result = spec()
    if i != len(tokens):
        raise ValueError(f"bad group spec {text!r}: trailing input")
    return result


# --------------------------------------------------------------------------
# Lie algebras


@dataclass(frozen=True, eq=False)
class AlgebraBasis:
    """Real basis of a Lie subalgebra of u(N), stored as an ``(d, N, N)`` array."""

    elements: np.ndarray

    def __post_init__(self):
        el = np.asarray(self.elements, dtype=complex)
        if el.ndim != 3:
            raise ValueError("basis elements must be stacked as (d, N, N)")
        el.setflags(write=False)
        object.__setattr__(self, "elements", el)

    @property
    def dim_ambient(self) -> int:
        return self.elements.shape[1]

    def __len__(self):
        return self.elements.shape[0]

    def __iter__(self):
        return iter(self.elements)

    def coords(self, x) -> tuple[np.ndarray, float]:
        """Least-squares real coordinates of x and the residual norm."""
        if len(self) == 0:
            return np.zeros(0), fro_norm(x)
        m = realify(self.elements)
        rhs = realify(np.asarray(x, dtype=complex)[None])[:, 0]
        c, *_ = np.linalg.lstsq(m, rhs, rcond=None)
        return c, float(np.linalg.norm(m @ c - rhs))

    def combine(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=float), self.elements, axes=1)

    def orthonormal(self) -> "AlgebraBasis":
        """Orthonormal basis of the same span for <X,Y> = Re tr(X^dagger Y)."""
        if len(self) == 0:
            return self
        q, _ = np.linalg.qr(realify(self.elements))
        n = self.dim_ambient
        flat = q[: n * n] + 1j * q[n * n :]
        return AlgebraBasis(flat.T.reshape(-1, n, n))

    def is_valid(self, tol: float = TOL.exact) -> bool:
        if not all(is_skew_hermitian(x, tol) for x in self.elements):
            return False
        if len(self) == 0:
            return True
        s = np.linalg.svd(realify(self.elements), compute_uv=False)
        return bool(s[-1] > tol * s[0])


def independent_span(mats, tol: float = TOL.exact) -> np.ndarray:
    """Greedy real-linearly independent subset, preserving the given elements.

    An element is kept when its residual against the span of the kept ones
    exceeds ``tol`` relative to its own norm.
    """
    kept, q = [], None
    for x in mats:
        x = np.asarray(x, dtype=complex)
        nx = fro_norm(x)
        if nx == 0.0:
            continue
        v = realify(x[None])[:, 0]
        r = v if q is None else v - q @ (q.T @ v)
        if q is not None:
            r = r - q @ (q.T @ r)  # second pass for stability
        if np.linalg.norm(r) > tol * nx:
            kept.append(x)
            col = (r / np.linalg.norm(r))[:, None]
            q = col if q is None else np.hstack([q, col])
    n = mats[0].shape[0] if len(mats) else 0
    return np.array(kept, dtype=complex).reshape(-1, n, n)


def _unitary_algebra(n: int, traceless: bool) -> list[np.ndarray]:
    out = []
    if traceless:
        for k in range(n - 1):
            d = np.zeros((n, n), dtype=complex)
            d[k, k], d[k + 1, k + 1] = 1j, -1j
            out.append(d)
    else:
        for k in range(n):
            d = np.zeros((n, n), dtype=complex)
            d[k, k] = 1j
            out.append(d)
    for k in range(n):
        for l in range(k + 1, n):
            x = np.zeros((n, n), dtype=complex)
            x[k, l], x[l, k] = 1.0, -1.0
            y = np.zeros((n, n), dtype=complex)
            y[k, l] = y[l, k] = 1j
            out.extend([x, y])
    return out


def _embed_local(op: np.ndarray, pos: int, n: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for j in range(n):
        out = np.kron(out, op if j == pos else np.eye(2))
    return out


def _hat_sum(b1, b2, n1: int, n2: int) -> list[np.ndarray]:
    e1, e2 = np.eye(n1), np.eye(n2)
    return [kron(x, e2) for x in b1] + [kron(e1, y) for y in b2]


def _block_embed(b1, b2, n1: int, n2: int) -> list[np.ndarray]:
    z1, z2 = np.zeros((n1, n1)), np.zeros((n2, n2))
    return [direct_sum(x, z2) for x in b1] + [direct_sum(z1, y) for y in b2]


@lru_cache(maxsize=128)
def algebra_basis(spec: GroupSpec) -> AlgebraBasis:
    """Real basis of the Lie algebra of K."""
    return AlgebraBasis(independent_span(_algebra_list(spec)))


def _algebra_list(spec: GroupSpec) -> list[np.ndarray]:
    if isinstance(spec, FullUnitary):
        return _unitary_algebra(spec.n, traceless=False)
    if isinstance(spec, SpecialUnitary):
        return _unitary_algebra(spec.n, traceless=True)
    if isinstance(spec, Torus):
        return [np.diag(1j * np.asarray(spec.weights, dtype=float))]
    if isinstance(spec, Local):
        return [_embed_local(1j * PAULI[p], j, spec.n) for j in range(spec.n) for p in "xyz"]
    if isinstance(spec, TensorProd):
        return _hat_sum(_algebra_list(spec.left), _algebra_list(spec.right), spec.left.dim, spec.right.dim)
    if isinstance(spec, DirectSum):
        return _block_embed(_algebra_list(spec.left), _algebra_list(spec.right), spec.left.dim, spec.right.dim)
    raise TypeError(f"unknown group spec {spec!r}")


@lru_cache(maxsize=128)
def torus_basis(spec: GroupSpec) -> AlgebraBasis:
    """Diagonal maximal Abelian subalgebra of the Lie algebra of K."""
    return AlgebraBasis(independent_span(_torus_list(spec)))


def _torus_list(spec: GroupSpec) -> list[np.ndarray]:
    if isinstance(spec, (FullUnitary, SpecialUnitary)):
        return [x for x in _algebra_list(spec) if np.count_nonzero(x - np.diag(np.diag(x))) == 0]
    if isinstance(spec, Torus):
        return _algebra_list(spec)
    if isinstance(spec, Local):
        return [_embed_local(1j * PAULI["z"], j, spec.n) for j in range(spec.n)]
    if isinstance(spec, TensorProd):
        return _hat_sum(_torus_list(spec.left), _torus_list(spec.right), spec.left.dim, spec.right.dim)
    if isinstance(spec, DirectSum):
        return _block_embed(_torus_list(spec.left), _torus_list(spec.right), spec.left.dim, spec.right.dim)
    raise TypeError(f"unknown group spec {spec!r}")


def contains_algebra(spec: GroupSpec, omega, tol: float = TOL.feas) -> bool:
    """Whether the skew-Hermitian ``omega`` lies in the Lie algebra of K."""
    omega = as_matrix(omega, spec.dim)
    scale = max(1.0, fro_norm(omega))
    if not is_skew_hermitian(omega, TOL.exact * scale):
        raise ValueError("contains_algebra requires a skew-Hermitian matrix")
    _, res = algebra_basis(spec).coords(omega)
    return res <= tol * scale


# --------------------------------------------------------------------------
# Haar sampling


def haar_unitary(n: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-distributed U(n) element(s): QR of a Ginibre matrix with phase fix."""
    shape = (n, n) if size is None else (size, n, n)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[..., None, :]


def _su2_batch(rng: np.random.Generator, size: int) -> np.ndarray:
    # uniform unit quaternion (a, b, c, d) -> [[a+ib, c+id], [-c+id, a-ib]]
    q = rng.standard_normal((size, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    a, b, c, d = q.T
    out = np.empty((size, 2, 2), dtype=complex)
    out[:, 0, 0] = a + 1j * b
    out[:, 0, 1] = c + 1j * d
    out[:, 1, 0] = -c + 1j * d
    out[:, 1, 1] = a - 1j * b
    return out


def _batch_kron(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    m, n1, _ = x.shape
    n2 = y.shape[1]
    return np.einsum("kij,kab->kiajb", x, y).reshape(m, n1 * n2, n1 * n2)


def _sample(spec: GroupSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    if isinstance(spec, FullUnitary):
        return haar_unitary(spec.n, rng, size)
    if isinstance(spec, SpecialUnitary):
        u = haar_unitary(spec.n, rng, size)
        det = np.linalg.det(u)
        return u * (det ** (-1.0 / spec.n))[:, None, None]
    if isinstance(spec, Torus):
        t = rng.uniform(0.0, 2.0 * np.pi, size)
        w = np.asarray(spec.weights, dtype=float)
        out = np.zeros((size, spec.dim, spec.dim), dtype=complex)
        idx = np.arange(spec.dim)
        out[:, idx, idx] = np.exp(1j * t[:, None] * w[None, :])
        return out
    if isinstance(spec, Local):
        out = _su2_batch(rng, size)
        for _ in range(spec.n - 1):
            out = _batch_kron(out, _su2_batch(rng, size))
        return out
    if isinstance(spec, TensorProd):
        return _batch_kron(_sample(spec.left, rng, size), _sample(spec.right, rng, size))
    if isinstance(spec, DirectSum):
        a = _sample(spec.left, rng, size)
        b = _sample(spec.right, rng, size)
        n1 = spec.left.dim
        out = np.zeros((size, spec.dim, spec.dim), dtype=complex)
        out[:, :n1, :n1] = a
        out[:, n1:, n1:] = b
        return out
    raise TypeError(f"unknown group spec {spec!r}")


def haar_batch(spec: GroupSpec, count: int, seed) -> np.ndarray:
    """``count`` independent Haar samples from K as a ``(count, N, N)`` array."""
    rng = np.random.default_rng(seed)
    return _sample(spec, rng, int(count))


def haar_sample(spec: GroupSpec, seed) -> np.ndarray:
    """One Haar-distributed element of K, deterministic in ``seed``."""
    return haar_batch(spec, 1, seed)[0]
