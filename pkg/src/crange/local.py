"""The local unitary group SU(2)^{(x)n}: torus feasibility, 4x4 classification
and the signed local permutation group.

The diagonal torus algebra of the local group is spanned by the Pauli-z
embeddings ``i Z_j``.  An element ``Delta = i diag(mu)`` lies in it iff
``mu`` is in the integer span of the sign vectors ``z_j``, and
``[Delta, A] = i A`` reads ``mu_k - mu_l = 1`` on the support of A.  Both
conditions are integer linear systems, so feasibility is decided exactly
over the rationals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .config import TOL
from .groups import Local, algebra_basis, haar_batch
from .linalg import BlockPartition, DimensionError, as_matrix, dagger, fro_norm, kron_all
from .symmetry import SymmetryCertificate

__all__ = [
    "FeasibilitySystem",
    "TlocResult",
    "CaseLabel",
    "CASES",
    "case_labels",
    "ClassifyResult",
    "PermGroupEx",
    "ConjectureResult",
    "pauli_z_signs",
    "tloc_feasibility",
    "classify_4x4",
    "perm_group_ex",
    "conjecture_check",
    "random_etloc",
    "invariance_check_Etloc",
    "homotopy_trace",
    "P_OUT",
    "J2",
]

J2 = np.array([[0, 1], [-1, 0]])
P_OUT = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, -1, 0, 0], [0, 0, 0, 1]])


# ---------------------------------------------------------------- exact algebra


def _rref(rows: list[list[Fraction]], ncols: int):
    """Reduced row echelon form in place; returns the pivot columns."""
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def _nullspace(mat: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    rows = [list(r) for r in mat]
    piv = _rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -rows[i][f]
        out.append(v)
    return out


@lru_cache(maxsize=None)
def pauli_z_signs(n: int) -> tuple[tuple[int, ...], ...]:
    """Diagonals of the n embeddings I (x) .. (x) Z (x) .. (x) I (qubit 1 most significant)."""
    size = 2**n
    return tuple(tuple(1 - 2 * ((k >> (n - 1 - j)) & 1) for k in range(size)) for j in range(n))


@lru_cache(maxsize=None)
def _x_loc(n: int) -> tuple[tuple[Fraction, ...], ...]:
    z = [[Fraction(v) for v in row] for row in pauli_z_signs(n)]
    return tuple(tuple(r) for r in _nullspace(z, 2**n))


@dataclass(frozen=True, eq=False)
class FeasibilitySystem:
    """Exact system x_loc mu = 0, x_ad mu = phi * 1 (phi normalized to 1)."""

    x_loc: tuple[tuple[Fraction, ...], ...]
    x_ad: tuple[tuple[int, ...], ...]
    support: tuple[tuple[int, int], ...]
    n: int
    phi: Fraction = Fraction(1)


@dataclass(frozen=True, eq=False)
class TlocResult:
    """Outcome of the exact torus feasibility solve.

    ``mu`` are the diagonal entries of ``Delta = i diag(mu)`` and ``lam`` its
    coordinates along the Pauli-z embeddings ``i Z_j``.
    """

    feasible: bool
    mu: tuple[Fraction, ...] | None
    lam: tuple[Fraction, ...] | None
    phi: Fraction
    system: FeasibilitySystem

    @property
    def omega(self) -> np.ndarray | None:
        if self.mu is None:
            return None
        return np.diag([1j * float(x) for x in self.mu])

    @property
    def case_coords(self) -> tuple[Fraction, Fraction]:
        """(lambda, mu) with Delta = i diag(lambda, mu, -mu, -lambda); n = 2 only."""
        if self.mu is None or len(self.mu) != 4:
            raise ValueError("case coordinates need a feasible 4x4 solve")
        return self.mu[0], self.mu[1]

    @property
    def period_multiplier(self) -> int:
        """Least common multiple of the denominators of ``lam``."""
        if self.lam is None:
            raise ValueError("infeasible system has no witness")
        return math.lcm(*(x.denominator for x in self.lam))

    def certificate(self, a) -> SymmetryCertificate:
        spec = f"loc({self.system.n})"
        if not self.feasible:
            return SymmetryCertificate(False, None, 0.0, float("inf"), (), spec)
        om = self.omega
        a = as_matrix(a)
        res = fro_norm(om @ a - a @ om - 1j * a) / fro_norm(a)
        return SymmetryCertificate(True, om, 1.0, res, (), spec)


def _support(a: np.ndarray, tol: float) -> list[tuple[int, int]]:
    thr = tol * max(1.0, fro_norm(a))
    k, l = np.nonzero(np.abs(a) > thr)
    return [(int(i), int(j)) for i, j in zip(k, l)]


def tloc_feasibility(a, n: int, tol: float = TOL.exact) -> TlocResult:
    """Exact rational solve for Delta' = i diag(mu) in the local torus with [Delta', A] = i A."""
    a = as_matrix(a)
    size = 2**n
    if a.shape[0] != size:
        raise DimensionError(f"A has dimension {a.shape[0]}, expected 2**{n}")
    if np.max(np.abs(np.diag(a))) > tol * max(1.0, fro_norm(a)):
        raise ValueError("A must have zero diagonal")
    sup = _support(a, tol)
    if not sup:
        raise ValueError("A must be nonzero")
    x_loc = _x_loc(n)
    x_ad = []
    for k, l in sup:
        row = [0] * size
        row[k], row[l] = 1, -1
        x_ad.append(tuple(row))
    system = FeasibilitySystem(x_loc, tuple(x_ad), tuple(sup), n)
    aug = [list(r) + [Fraction(0)] for r in x_loc]
    aug += [[Fraction(v) for v in r] + [Fraction(1)] for r in x_ad]
    piv = _rref(aug, size + 1)
    if size in piv:
        return TlocResult(False, None, None, Fraction(1), system)
    mu = [Fraction(0)] * size
    for i, p in enumerate(piv):
        mu[p] = aug[i][size]
    z = pauli_z_signs(n)
    lam = tuple(sum((Fraction(s) * m for s, m in zip(zj, mu)), Fraction(0)) / size for zj in z)
    return TlocResult(True, tuple(mu), lam, Fraction(1), system)


# ---------------------------------------------------------------- 4x4 case table

# 1-based nonzero positions of each case pattern for Delta = i diag(l, m, -m, -l),
# and the eigenvalue relations as coefficient pairs (c_l, c_m) with phi = c_l*l + c_m*m.
CASES: dict[int, tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]] = {
    1: (((2, 1), (4, 3)), ((-1, 1),)),
    2: (((3, 1), (4, 2)), ((-1, -1),)),
    3: (((4, 1),), ((-2, 0),)),
    4: (((3, 2),), ((0, -2),)),
    5: (((2, 1), (3, 1), (4, 2), (4, 3)), ((-1, 1), (-1, -1))),
    6: (((1, 3), (2, 1), (2, 4), (4, 3)), ((-1, 1), (1, 1))),
    7: (((2, 1), (4, 1), (4, 3)), ((-1, 1), (-2, 0))),
    8: (((1, 4), (2, 1), (4, 3)), ((-1, 1), (2, 0))),
    9: (((2, 1), (3, 2), (4, 3)), ((-1, 1), (0, -2))),
    10: (((2, 1), (2, 3), (4, 3)), ((-1, 1), (0, 2))),
    11: (((3, 1), (4, 1), (4, 2)), ((-1, -1), (-2, 0))),
    12: (((1, 4), (3, 1), (4, 2)), ((-1, -1), (2, 0))),
    13: (((3, 1), (3, 2), (4, 2)), ((-1, -1), (0, -2))),
    14: (((2, 3), (3, 1), (4, 2)), ((-1, -1), (0, 2))),
    15: (((3, 1), (3, 2), (4, 1), (4, 2)), ((-2, 0), (0, -2))),
    16: (((2, 1), (2, 3), (4, 1), (4, 3)), ((-2, 0), (0, 2))),
}


@dataclass(frozen=True)
class CaseLabel:
    index: int
    transposed: bool = False

    def __post_init__(self):
        if self.index not in CASES:
            raise ValueError(f"case index must be 1..16, got {self.index}")

    @property
    def pattern(self) -> frozenset[tuple[int, int]]:
        pos = CASES[self.index][0]
        return frozenset((l, k) for k, l in pos) if self.transposed else frozenset(pos)

    @property
    def relations(self) -> tuple[tuple[int, int], ...]:
        """phi = c_l*lambda + c_m*mu for each pair; transposition flips phi."""
        rel = CASES[self.index][1]
        return tuple((-cl, -cm) for cl, cm in rel) if self.transposed else rel

    def mask(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=bool)
        for k, l in self.pattern:
            m[k - 1, l - 1] = True
        return m

    def instance(self, rng: np.random.Generator) -> np.ndarray:
        """Random matrix with nonzero entries exactly on the pattern."""
        a = np.zeros((4, 4), dtype=complex)
        for k, l in self.pattern:
            z = rng.standard_normal() + 1j * rng.standard_normal()
            a[k - 1, l - 1] = z if abs(z) > 0.1 else 1.0
        return a

    def __str__(self):
        return f"Case {self.index}" + ("^T" if self.transposed else "")


def case_labels() -> list[CaseLabel]:
    """All 32 labels: the 16 printed cases followed by their transposes."""
    return [CaseLabel(i, t) for t in (False, True) for i in range(1, 17)]


@dataclass(frozen=True, eq=False)
class ClassifyResult:
    found: bool
    label: CaseLabel | None
    U: np.ndarray | None
    off_pattern_mass: float
    restarts: int
    best_label: CaseLabel | None = None

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        lab = self.label if self.found else self.best_label
        out = {
            "found": self.found,
            "label": None if lab is None else lab.index,
            "transposed": None if lab is None else lab.transposed,
            "off_pattern_mass": self.off_pattern_mass,
            "restarts": self.restarts,
        }
        if self.found:
            out["witness_U"] = matrix_to_json(self.U)
        else:
            out["status"] = "no pattern found"
        return out


def _batched_expm_skew(x: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(1j * x)
    return np.einsum("rij,rj,rkj->rik", v, np.exp(-1j * w), np.conj(v))


def _lm_pattern(a, mask, us, basis, iters: int):
    """Batched Levenberg-Marquardt on off-pattern mass over the local group."""
    off = ~mask
    r_count = us.shape[0]
    nu = np.full(r_count, 1e-3)

    def resid(u):
        m = u @ a @ dagger(u)
        r = m[:, off]
        return m, np.concatenate([r.real, r.imag], axis=1)

    m, r = resid(us)
    f = np.einsum("ri,ri->r", r, r)
    for _ in range(iters):
        # derivative of M along B is [B, M]
        dm = np.einsum("kij,rjl->rkil", basis, m) - np.einsum("rij,kjl->rkil", m, basis)
        d = dm[:, :, off]
        jac = np.concatenate([d.real, d.imag], axis=2).transpose(0, 2, 1)
        jtj = np.einsum("rik,ril->rkl", jac, jac)
        g = np.einsum("rik,ri->rk", jac, r)
        lhs = jtj + nu[:, None, None] * np.eye(basis.shape[0])
        step = -np.linalg.solve(lhs, g[..., None])[..., 0]
        cand = _batched_expm_skew(np.einsum("rk,kij->rij", step, basis)) @ us
        m_c, r_c = resid(cand)
        f_c = np.einsum("ri,ri->r", r_c, r_c)
        ok = f_c < f
        us = np.where(ok[:, None, None], cand, us)
        m = np.where(ok[:, None, None], m_c, m)
        r = np.where(ok[:, None], r_c, r)
        f = np.where(ok, f_c, f)
        nu = np.where(ok, nu * 0.3, nu * 10.0)
        nu = np.clip(nu, 1e-15, 1e12)
        if np.min(f) < 1e-30:
            break
    return us, f


def classify_4x4(a, restarts: int = 64, seed: int = 0, tol: float = TOL.feas, iters: int = 60) -> ClassifyResult:
    """Search SU(2) (x) SU(2) for a conjugation of A into one of the 32 case patterns.

    Restart 0 is the identity; the rest are Haar-random.  A negative answer
    means only that no pattern was reached within the restart budget.
    """
    a = as_matrix(a)
    if a.shape[0] != 4:
        raise DimensionError(f"classify_4x4 needs a 4x4 matrix, got {a.shape[0]}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    scale = fro_norm(a)
    if scale == 0.0:
        raise ValueError("A must be nonzero")
    an = a / scale
    for lab in case_labels():
        mass = fro_norm(np.where(lab.mask(), 0.0, an))
        if mass <= tol:
            return ClassifyResult(True, lab, np.eye(4, dtype=complex), mass * scale, restarts, lab)
    spec = Local(2)
    basis = algebra_basis(spec).orthonormal().elements
    starts = np.concatenate([np.eye(4, dtype=complex)[None], haar_batch(spec, restarts - 1, seed)])
    best = (np.inf, None, None)
    for lab in case_labels():
        us, f = _lm_pattern(an, lab.mask(), starts, basis, iters)
        k = int(np.argmin(f))
        mass = float(np.sqrt(max(f[k], 0.0)))
        if mass < best[0]:
            best = (mass, lab, us[k])
        if mass <= tol:
            return ClassifyResult(True, lab, us[k], mass * scale, restarts, lab)
    return ClassifyResult(False, None, None, best[0] * scale, restarts, best[1])


# ---------------------------------------------------------------- permutation groups


def _key(p: np.ndarray) -> bytes:
    return np.asarray(np.rint(p.real), dtype=np.int8).tobytes()


def _closure(gens: list[np.ndarray], start: list[np.ndarray] | None = None) -> list[np.ndarray]:
    size = gens[0].shape[0]
    elems = {_key(np.eye(size)): np.eye(size, dtype=np.int64)}
    for s in start or []:
        elems.setdefault(_key(s), s)
    frontier = list(elems.values())
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = x @ g
                k = _key(y)
                if k not in elems:
                    elems[k] = y
                    new.append(y)
        frontier = new
    return [elems[k] for k in sorted(elems)]


@dataclass(frozen=True, eq=False)
class PermGroupEx:
    """Signed permutation group generated by local factors and embedded P_out.

    ``loc`` holds the signed local permutations (tensor products of
    +-I, +-J), ``out`` the group generated by P_out embeddings and
    ``elements`` the closure of both.  ``product_is_closed`` records whether
    the set product loc * out is itself a group.
    """

    n: int
    elements: tuple[np.ndarray, ...]
    loc: tuple[np.ndarray, ...]
    out: tuple[np.ndarray, ...]
    product_is_closed: bool = field(default=False)

    def __len__(self):
        return len(self.elements)

    def in_loc(self, p: np.ndarray) -> bool:
        return _key(p) in {_key(x) for x in self.loc}


@lru_cache(maxsize=None)
def perm_group_ex(n: int) -> PermGroupEx:
    if n < 1:
        raise ValueError("n must be >= 1")
    factors = [np.eye(2, dtype=np.int64), -np.eye(2, dtype=np.int64), J2, -J2]
    loc = {}
    for combo in product(factors, repeat=n):
        p = np.rint(kron_all(*combo).real).astype(np.int64)
        loc.setdefault(_key(p), p)
    loc_list = [loc[k] for k in sorted(loc)]
    size = 2**n
    out_gens = []
    for pos in range(n - 1):
        mats = [np.eye(2)] * pos + [P_OUT] + [np.eye(2)] * (n - 2 - pos)
        out_gens.append(np.rint(kron_all(*mats).real).astype(np.int64))
    out_list = _closure(out_gens) if out_gens else [np.eye(size, dtype=np.int64)]
    loc_gens = [np.rint(kron_all(*([np.eye(2)] * j + [J2] + [np.eye(2)] * (n - 1 - j))).real).astype(np.int64)
                for j in range(n)]
    loc_gens.append(-np.eye(size, dtype=np.int64))
    full = _closure(loc_gens + out_gens)
    prod_keys = {_key(x @ y) for x in loc_list for y in out_list}
    closed = prod_keys == {_key(x) for x in full}
    return PermGroupEx(n, tuple(full), tuple(loc_list), tuple(out_list), closed)


@dataclass(frozen=True, eq=False)
class ConjectureResult:
    found: bool
    P: np.ndarray | None
    partition: BlockPartition | None
    involves_out: bool = False
    searched: int = 0


@lru_cache(maxsize=None)
def _compositions(size: int) -> np.ndarray:
    """Block labels of every contiguous composition of ``size`` (2**(size-1) rows)."""
    cuts = np.array(list(product((0, 1), repeat=size - 1)), dtype=np.int64).reshape(-1, size - 1)
    return np.concatenate([np.zeros((cuts.shape[0], 1), dtype=np.int64), np.cumsum(cuts, axis=1)], axis=1)


def _blockshift_partition(mask: np.ndarray) -> BlockPartition | None:
    """Contiguous partition in which only (l+1, l) blocks of ``mask`` are set, if any."""
    labels = _compositions(mask.shape[0])
    k, l = np.nonzero(mask)
    ok = np.all(labels[:, k] == labels[:, l] + 1, axis=1)
    if not np.any(ok):
        return None
    lab = labels[int(np.argmax(ok))]
    return BlockPartition(tuple(int(c) for c in np.bincount(lab)))


def conjecture_check(a, n: int, tol: float = TOL.exact) -> ConjectureResult:
    """Exhaustive search over the extended local permutation group for P with P A P^T block-shift.

    Elements of the signed local group are tried first, so a witness that
    needs P_out is reported with ``involves_out``.
    """
    a = as_matrix(a)
    if not tloc_feasibility(a, n, tol).feasible:
        raise ValueError("A is not in the eigenspace union of the local torus")
    grp = perm_group_ex(n)
    loc_keys = {_key(x) for x in grp.loc}
    eye_key = _key(np.eye(a.shape[0]))
    ordered = [np.eye(a.shape[0], dtype=np.int64)] + [p for p in grp.loc if _key(p) != eye_key]
    ordered += [p for p in grp.elements if _key(p) not in loc_keys]
    thr = tol * max(1.0, fro_norm(a))
    for count, p in enumerate(ordered, start=1):
        m = p @ a @ p.T
        part = _blockshift_partition(np.abs(m) > thr)
        if part is not None:
            return ConjectureResult(True, p, part, _key(p) not in loc_keys, count)
    return ConjectureResult(False, None, None, False, len(ordered))


def random_etloc(n: int, rng: np.random.Generator, max_coef: int = 3) -> np.ndarray:
    """Random element of E_phi(Delta) for a random integer local torus element Delta."""
    z = np.array(pauli_z_signs(n))
    while True:
        c = rng.integers(-max_coef, max_coef + 1, size=n)
        mu = c @ z
        diff = mu[:, None] - mu[None, :]
        phis = np.unique(diff[diff > 0])
        if phis.size:
            break
    phi = rng.choice(phis) * rng.choice([-1, 1])
    mask = diff == phi
    keep = mask & (rng.random(mask.shape) < 0.7)
    if not keep.any():
        keep = mask
    vals = rng.standard_normal(mask.shape) + 1j * rng.standard_normal(mask.shape)
    return np.where(keep, vals, 0.0)


def invariance_check_Etloc(n: int, trials: int = 100, seed: int = 0) -> bool:
    """Random elements of E(t_loc) stay torus-feasible under conjugation by random group elements."""
    rng = np.random.default_rng(seed)
    grp = perm_group_ex(n)
    for _ in range(trials):
        a = random_etloc(n, rng)
        p = grp.elements[int(rng.integers(len(grp)))]
        if not tloc_feasibility(p @ a @ p.T, n).feasible:
            return False
    return True


# ---------------------------------------------------------------- disc mechanism


def homotopy_trace(c, a, omega, n: int, period: float, t_steps: int = 400, s_steps: int = 101) -> np.ndarray:
    """h(t, s) = tr(C^dagger H A H^dagger), H = R(s)^{dagger(x)n} e^{t Omega} R(s)^{(x)n}.

    ``omega`` must be diagonal; t runs over [0, period] and s over [0, pi/2].
    Rows index t, columns index s.
    """
    c, a, omega = as_matrix(c), as_matrix(a), as_matrix(omega)
    d = np.diag(omega)
    t = np.linspace(0.0, period, t_steps)
    s = np.linspace(0.0, np.pi / 2, s_steps)
    out = np.empty((t_steps, s_steps), dtype=complex)
    ch = np.conj(c)
    for j, sv in enumerate(s):
        r = np.array([[np.cos(sv), np.sin(sv)], [-np.sin(sv), np.cos(sv)]])
        u = kron_all(*([r] * n))
        # H A H^dagger = U^dagger E(t) (U A U^dagger) E(t)^dagger U
        b = u @ a @ dagger(u)
        ph = np.exp(t[:, None, None] * (d[None, :, None] - d[None, None, :]))
        m = dagger(u)[None] @ (ph * b[None]) @ u[None]
        out[:, j] = np.einsum("kij,ij->k", m, ch)
    return out
