"""Lie-algebraic decisions about rotational symmetry of K-orbits.

The orbit {U A U^dagger : U in K} is weakly rotationally symmetric iff some
Omega in the Lie algebra of K has A as an eigenvector of ad_Omega with a
nonzero (imaginary) eigenvalue.  Rescaling Omega normalizes the eigenvalue to
``i``, so the decision is a single real-linear least-squares problem over a
basis of the algebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import TOL
from .groups import AlgebraBasis, FullUnitary, GroupSpec, algebra_basis, independent_span, torus_basis
from .linalg import (
    BlockPartition,
    as_matrix,
    commutator,
    dagger,
    fro_norm,
    is_skew_hermitian,
    realify,
)

__all__ = [
    "SymmetryCertificate",
    "EigenspaceQuery",
    "BlockShiftResult",
    "SeparationIndexResult",
    "detect_weak_symmetry",
    "eigenspace_basis",
    "blockshift_canonical",
    "is_blockshift",
    "separation_index",
    "lie_closure",
    "is_su2",
    "killing_form",
    "su2_generators",
]


@dataclass(frozen=True, eq=False)
class SymmetryCertificate:
    """Witness (omega, phi) with [omega, A] = i phi A, or a refutation."""

    verdict: bool
    omega: np.ndarray | None
    phi: float
    residual: float
    singular_values: tuple[float, ...] = ()
    spec: str = ""

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        out = {"verdict": self.verdict, "phi": self.phi, "residual": self.residual, "spec": self.spec}
        if self.omega is not None:
            out["omega"] = matrix_to_json(self.omega)
        if not self.verdict:
            out["singular_values"] = list(self.singular_values)
        return out


@dataclass(frozen=True, eq=False)
class EigenspaceQuery:
    delta: np.ndarray
    phi: float

    def __post_init__(self):
        d = as_matrix(self.delta)
        if fro_norm(d - np.diag(np.diag(d))) > TOL.exact:
            raise ValueError("delta must be diagonal")
        object.__setattr__(self, "delta", d)


@dataclass(frozen=True, eq=False)
class BlockShiftResult:
    found: bool
    U: np.ndarray | None = None
    partition: BlockPartition | None = None
    M: np.ndarray | None = None
    off_pattern: float = float("nan")
    certificate: SymmetryCertificate | None = None
    levels: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class SeparationIndexResult:
    is_one: bool
    upper_bound: int | None
    witness: tuple[np.ndarray, float] | None = None
    details: dict = field(default_factory=dict)


def _nonzero(a) -> np.ndarray:
    a = as_matrix(a)
    if fro_norm(a) == 0.0:
        raise ValueError("A must be nonzero")
    return a


def detect_weak_symmetry(a, spec: GroupSpec, tol: float = TOL.feas, torus: bool = False) -> SymmetryCertificate:
    """Decide whether Omega in k(spec) with [Omega, A] = i A exists.

    With ``torus=True`` the search is restricted to the diagonal torus
    algebra, i.e. it decides membership of A itself in E(t).
    """
    a = _nonzero(a)
    if spec.dim != a.shape[0]:
        from .linalg import DimensionError

        raise DimensionError(f"group {spec} acts on dimension {spec.dim}, A has {a.shape[0]}")
    an = a / fro_norm(a)
    basis = (torus_basis(spec) if torus else algebra_basis(spec)).orthonormal()
    cols = np.array([commutator(b, an) for b in basis.elements])
    m = realify(cols)
    rhs = realify((1j * an)[None])[:, 0]
    coef, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    res = float(np.linalg.norm(m @ coef - rhs))
    sv = tuple(float(s) for s in np.linalg.svd(m, compute_uv=False))
    if res <= tol:
        omega = basis.combine(coef)
        return SymmetryCertificate(True, omega, 1.0, res, sv, str(spec))
    return SymmetryCertificate(False, None, 0.0, res, sv, str(spec))


def eigenspace_basis(q: EigenspaceQuery, n: int | None = None, tol: float = TOL.exact) -> list[np.ndarray]:
    """Matrix units E_kl spanning {X : [delta, X] = i phi X} for diagonal delta."""
    lam = np.real(-1j * np.diag(q.delta))
    n = lam.size if n is None else n
    if n != lam.size:
        raise ValueError("dimension does not match delta")
    scale = max(1.0, float(np.max(np.abs(lam))) if lam.size else 1.0, abs(q.phi))
    out = []
    for k in range(n):
        for l in range(n):
            if abs(lam[k] - lam[l] - q.phi) <= tol * scale:
                e = np.zeros((n, n), dtype=complex)
                e[k, l] = 1.0
                out.append(e)
    return out


# ---------------------------------------------------------------- block shift


def _clusters(lam: np.ndarray) -> np.ndarray:
    """Cluster labels of sorted-by-value eigenvalues, gap threshold 1e-6 * spread."""
    order = np.argsort(lam, kind="stable")
    spread = float(lam.max() - lam.min()) if lam.size else 0.0
    thr = 1e-6 * max(spread, 1.0)
    labels = np.empty(lam.size, dtype=np.int64)
    cur = 0
    for pos, idx in enumerate(order):
        if pos > 0 and lam[idx] - lam[order[pos - 1]] > thr:
            cur += 1
        labels[idx] = cur
    return labels


def _components(n_nodes: int, edges) -> np.ndarray:
    parent = list(range(n_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = [find(i) for i in range(n_nodes)]
    _, comp = np.unique(roots, return_inverse=True)
    return comp


def _levels(values: np.ndarray, edges, comp: np.ndarray) -> np.ndarray:
    """Integer level per node: value minus the minimum of its component, rounded."""
    lev = np.zeros(values.size, dtype=np.int64)
    for c in np.unique(comp):
        idx = np.flatnonzero(comp == c)
        lev[idx] = np.round(values[idx] - values[idx].min()).astype(np.int64)
    return lev


def is_blockshift(m, partition: BlockPartition, tol: float = TOL.feas) -> tuple[bool, float]:
    """Whether only the (l+1, l) blocks of m are nonzero; also the off-pattern mass."""
    m = as_matrix(m)
    lab = partition.labels()
    allowed = lab[:, None] == lab[None, :] + 1
    mass = fro_norm(np.where(allowed, 0.0, m))
    return mass <= tol * max(fro_norm(m), 1e-300), mass


def blockshift_canonical(a, tol: float = TOL.feas) -> BlockShiftResult:
    """Unitary U and partition with U A U^dagger in block-shift form, if any.

    A diagonal (torus) witness is preferred so that matrices that are already
    in adapted coordinates come back with U a permutation.
    """
    a = _nonzero(a)
    n = a.shape[0]
    spec = FullUnitary(n)
    cert = detect_weak_symmetry(a, spec, tol, torus=True)
    if cert.verdict:
        lam = np.real(-1j * np.diag(cert.omega))
        v = np.eye(n, dtype=complex)
    else:
        cert = detect_weak_symmetry(a, spec, tol)
        if not cert.verdict:
            return BlockShiftResult(False, certificate=cert)
        h = -1j * cert.omega
        lam, v = np.linalg.eigh(0.5 * (h + dagger(h)))
    m0 = dagger(v) @ a @ v
    clus = _clusters(lam)
    n_cl = int(clus.max()) + 1
    cl_val = np.array([lam[clus == k].mean() for k in range(n_cl)])
    scale = fro_norm(a)
    edges = []
    for k in range(n_cl):
        for l in range(n_cl):
            if fro_norm(m0[np.ix_(clus == k, clus == l)]) > tol * scale:
                edges.append((k, l))
    comp = _components(n_cl, edges)
    cl_lev = _levels(cl_val, edges, comp)
    lev = cl_lev[clus]
    perm = np.lexsort((np.arange(n), lev))
    u = dagger(v)[perm]
    mm = u @ a @ dagger(u)
    _, sizes = np.unique(lev[perm], return_counts=True)
    part = BlockPartition(tuple(int(s) for s in sizes))
    ok, mass = is_blockshift(mm, part, tol)
    if not ok:
        return BlockShiftResult(False, certificate=cert, off_pattern=mass)
    return BlockShiftResult(True, u, part, mm, mass, cert, lev[perm])


# ---------------------------------------------------------------- separation index


def _generic_witness(bs: BlockShiftResult, a: np.ndarray, tol: float):
    """Refined witness Omega' with the smallest eigenspace we can certify.

    Within each level block, diagonalize the block-diagonal Hermitian
    operator M^dagger M + sqrt(2) M M^dagger, split the basis into connected
    chains of M, and give each chain a distinct irrational offset.
    """
    m, lev, u = bs.M, bs.levels, bs.U
    n = m.shape[0]
    h = dagger(m) @ m + np.sqrt(2.0) * (m @ dagger(m))
    w = np.zeros((n, n), dtype=complex)
    for l in np.unique(lev):
        idx = np.flatnonzero(lev == l)
        sub = h[np.ix_(idx, idx)]
        _, vec = np.linalg.eigh(0.5 * (sub + dagger(sub)))
        w[np.ix_(idx, idx)] = vec
    mr = dagger(w) @ m @ w
    scale = fro_norm(a)
    edges = [(k, l) for k in range(n) for l in range(n) if abs(mr[k, l]) > tol * scale]
    comp = _components(n, edges)
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    lam = lev.astype(float) + np.mod(comp * golden, 1.0)
    ut = dagger(w) @ u
    omega = dagger(ut) @ np.diag(1j * lam) @ ut
    if fro_norm(commutator(omega, a) - 1j * a) > tol * max(1.0, fro_norm(omega)) * scale:
        return None
    diff = lam[:, None] - lam[None, :]
    dim = int(np.sum(np.abs(diff - 1.0) <= 1e-9))
    return omega, dim


def separation_index(a, tol: float = TOL.feas) -> SeparationIndexResult:
    """Decide I_s(A) = 1 exactly (A unitarily similar to c E_ij) and bound I_s otherwise."""
    a = _nonzero(a)
    s = np.linalg.svd(a, compute_uv=False)
    rank_one = s.size == 1 or s[1] <= TOL.nilp * s[0]
    square_zero = fro_norm(a @ a) <= TOL.nilp * fro_norm(a) ** 2
    is_one = bool(rank_one and square_zero)
    bs = blockshift_canonical(a, tol)
    if not bs.found:
        return SeparationIndexResult(is_one, None, None, {"blockshift": False})
    gw = _generic_witness(bs, a, tol)
    if gw is None:
        omega = bs.certificate.omega
        lam = np.linalg.eigvalsh(-1j * omega)
        dim = int(np.sum(np.abs(lam[:, None] - lam[None, :] - 1.0) <= 1e-9 * max(1.0, np.abs(lam).max())))
        gw = (omega, dim)
    omega, dim = gw
    if is_one:
        dim = 1
    return SeparationIndexResult(is_one, dim, (omega, 1.0), {"blockshift": True, "partition": bs.partition.sizes})


# ---------------------------------------------------------------- Lie closure


def lie_closure(generators, tol: float = TOL.exact, max_dim: int | None = None) -> AlgebraBasis:
    """Real Lie algebra generated by skew-Hermitian matrices (iterated brackets)."""
    gens = [as_matrix(g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    for g in gens:
        if not is_skew_hermitian(g, tol * max(1.0, fro_norm(g))):
            raise ValueError("generators must be skew-Hermitian")
    n = gens[0].shape[0]
    cap = n * n if max_dim is None else max_dim
    basis = list(independent_span(gens, tol))
    frontier = list(range(len(basis)))
    while frontier:
        new = []
        for i in frontier:
            for j in range(len(basis)):
                if i == j:
                    continue
                br = commutator(basis[i], basis[j])
                if fro_norm(br) <= tol:
                    continue
                trial = independent_span(basis + [br], tol)
                if len(trial) > len(basis):
                    basis.append(br)
                    new.append(len(basis) - 1)
                    if len(basis) >= cap:
                        return AlgebraBasis(np.array(basis))
        frontier = new
    return AlgebraBasis(np.array(basis))


def _structure_ad(basis: AlgebraBasis, tol: float) -> np.ndarray:
    """ad matrices in basis coordinates: ad[i][:, j] = coords of [B_i, B_j]."""
    d = len(basis)
    m = realify(basis.elements)
    ads = np.zeros((d, d, d))
    for i in range(d):
        brs = np.array([commutator(basis.elements[i], basis.elements[j]) for j in range(d)])
        rhs = realify(brs)
        coef, *_ = np.linalg.lstsq(m, rhs, rcond=None)
        res = np.linalg.norm(m @ coef - rhs, axis=0)
        norms = np.linalg.norm(rhs, axis=0)
        if np.any(res > 1e3 * tol * np.maximum(1.0, norms)):
            raise ValueError("basis is not closed under brackets")
        ads[i] = coef
    return ads


def killing_form(basis: AlgebraBasis, tol: float = TOL.exact) -> np.ndarray:
    ads = _structure_ad(basis, tol)
    return np.einsum("iab,jba->ij", ads, ads)


def is_su2(basis: AlgebraBasis, tol: float = TOL.exact) -> bool:
    """True iff the (bracket-closed) algebra is 3-dimensional with negative definite Killing form."""
    kf = killing_form(basis, tol)
    if len(basis) != 3:
        return False
    ev = np.linalg.eigvalsh(0.5 * (kf + kf.T))
    return bool(ev.max() < -1e3 * tol * max(1.0, np.abs(ev).max()))


def su2_generators(a) -> list[np.ndarray]:
    """The triple A - A^dagger, i(A + A^dagger), i[A, A^dagger]."""
    a = as_matrix(a)
    ad = dagger(a)
    return [a - ad, 1j * (a + ad), 1j * commutator(a, ad)]
