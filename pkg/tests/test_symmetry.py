import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crange.geometry import hausdorff
from crange.groups import FullUnitary, Local, SpecialUnitary, algebra_basis, contains_algebra, haar_sample
from crange.linalg import (
    DimensionError,
    commutator,
    dagger,
    expm_skew,
    fro_norm,
    is_nilpotent,
    matrix_unit,
)
from crange.numrange import sample_range
from crange.symmetry import (
    BlockPartition,
    EigenspaceQuery,
    blockshift_canonical,
    detect_weak_symmetry,
    eigenspace_basis,
    is_blockshift,
    is_su2,
    killing_form,
    lie_closure,
    separation_index,
    su2_generators,
)
from crange.demos import example, example5_data

from .planted import planted_positive, random_blockshift

seeds = st.integers(min_value=0, max_value=2**32 - 1)

SPECS = [FullUnitary(3), FullUnitary(4), SpecialUnitary(4), Local(2), Local(3)]
REMARK_MATRIX = matrix_unit(4, 2, 1) + 2 * matrix_unit(4, 4, 3)


def _certified(seed, spec):
    rng = np.random.default_rng(seed)
    a = planted_positive(rng, spec)
    cert = detect_weak_symmetry(a, spec)
    assert cert.verdict
    return a, cert


class TestDetect:
    def test_e21_with_diagonal_witness(self):
        cert = detect_weak_symmetry(matrix_unit(2, 2, 1), FullUnitary(2))
        assert cert.verdict
        om = cert.omega
        assert fro_norm(commutator(om, matrix_unit(2, 2, 1)) - 1j * matrix_unit(2, 2, 1)) <= 1e-12
        # the stated witness i diag(0, 1) also works
        w = np.diag([0, 1j])
        assert fro_norm(commutator(w, matrix_unit(2, 2, 1)) - 1j * matrix_unit(2, 2, 1)) == 0

    def test_example4_double_verdict(self):
        a = example(4).a
        assert not detect_weak_symmetry(a, Local(2)).verdict
        assert detect_weak_symmetry(a, FullUnitary(4)).verdict

    def test_refutation_fields(self):
        cert = detect_weak_symmetry(np.eye(2), FullUnitary(2))
        assert not cert.verdict and cert.omega is None
        assert cert.residual > 1e-8
        assert "singular_values" in cert.to_dict()

    def test_errors(self):
        with pytest.raises(ValueError):
            detect_weak_symmetry(np.zeros((2, 2)), FullUnitary(2))
        with pytest.raises(DimensionError):
            detect_weak_symmetry(np.eye(2), FullUnitary(3))

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.sampled_from(SPECS))
    def test_certificate_invariant(self, seed, spec):
        a, cert = _certified(seed, spec)
        res = fro_norm(commutator(cert.omega, a) - 1j * cert.phi * a)
        assert res <= 1e-8 * fro_norm(a)
        assert contains_algebra(spec, cert.omega)

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.sampled_from(SPECS))
    def test_lemma_properties_on_certified(self, seed, spec):
        a, cert = _certified(seed, spec)
        assert is_nilpotent(a)
        aa = commutator(a, dagger(a))
        assert fro_norm(aa) > 1e-10
        assert fro_norm(commutator(cert.omega, aa)) <= 1e-8 * fro_norm(cert.omega) * fro_norm(a) ** 2
        assert detect_weak_symmetry(dagger(a), spec).verdict
        nested = commutator(aa, a)
        if fro_norm(nested) > 1e-10 * fro_norm(a) ** 3:
            assert detect_weak_symmetry(nested, spec).verdict

    @settings(max_examples=20, deadline=None)
    @given(seeds, st.sampled_from([2, 3]))
    def test_monotone_in_the_group(self, seed, n):
        rng = np.random.default_rng(seed)
        a = planted_positive(rng, Local(n))
        for spec in (Local(n), SpecialUnitary(2**n), FullUnitary(2**n)):
            assert detect_weak_symmetry(a, spec).verdict

    def test_torus_restriction(self):
        a = example(4).a
        assert detect_weak_symmetry(a, FullUnitary(4), torus=True).verdict
        assert not detect_weak_symmetry(a, Local(2), torus=True).verdict

    def test_rotation_invariant_cloud(self, rng):
        spec = Local(2)
        a = planted_positive(rng, spec)
        c = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        cloud = sample_range(c, a, spec, 20_000, 0).points
        diam = np.ptp(cloud.real) + np.ptp(cloud.imag)
        for th in (2 * np.pi / 7, 1.0):
            assert hausdorff(cloud, np.exp(1j * th) * cloud) <= 0.05 * diam

    def test_example5_is_not_an_eigenvector(self):
        a, u0, om = example5_data()
        assert fro_norm(u0 @ a @ dagger(u0) + a) <= 1e-12
        assert fro_norm(commutator(om, a) + 1j * np.pi * a) >= 0.5 * fro_norm(a)
        assert np.allclose(expm_skew(om, 1.0), u0, atol=1e-15)


class TestEigenspace:
    def test_two_by_two_orientation(self):
        (b,) = eigenspace_basis(EigenspaceQuery(np.diag([0, 1j]), 1.0))
        np.testing.assert_array_equal(b, matrix_unit(2, 2, 1))

    def test_irrational_phi_is_empty(self):
        assert eigenspace_basis(EigenspaceQuery(np.diag([0, 1j, 2j]), np.sqrt(2))) == []

    def test_local_form_case1(self):
        lam, mu = 0.3, 0.3 + np.sqrt(2)
        delta = 1j * np.diag([lam, mu, -mu, -lam])
        out = eigenspace_basis(EigenspaceQuery(delta, mu - lam))
        keys = sorted((int(np.argmax(np.abs(b)) // 4) + 1, int(np.argmax(np.abs(b)) % 4) + 1) for b in out)
        assert keys == [(2, 1), (4, 3)]

    def test_zero_phi_includes_diagonal(self):
        out = eigenspace_basis(EigenspaceQuery(np.diag([1j, 1j, 0]), 0.0))
        assert len(out) == 5

    def test_rejects_non_diagonal(self):
        with pytest.raises(ValueError):
            EigenspaceQuery(matrix_unit(2, 2, 1), 1.0)

    @settings(max_examples=50)
    @given(seeds, st.integers(2, 6))
    def test_round_trip(self, seed, n):
        rng = np.random.default_rng(seed)
        lam = rng.integers(-3, 4, size=n).astype(float) * 0.7
        diff = lam[:, None] - lam[None, :]
        phi = float(rng.choice(diff.ravel()))
        delta = np.diag(1j * lam)
        basis = eigenspace_basis(EigenspaceQuery(delta, phi))
        assert len(basis) == int(np.sum(np.abs(diff - phi) < 1e-12))
        for t in (0.3, 1.7, 4.9):
            e = expm_skew(delta, t)
            for b in basis:
                assert fro_norm(e @ b @ dagger(e) - np.exp(1j * phi * t) * b) <= 1e-9


class TestBlockShift:
    def test_e21(self):
        res = blockshift_canonical(matrix_unit(2, 2, 1))
        assert res.found and res.partition == BlockPartition((1, 1))
        np.testing.assert_allclose(np.abs(res.M), matrix_unit(2, 2, 1), atol=1e-12)

    def test_example4_already_in_form(self):
        res = blockshift_canonical(example(4).a)
        assert res.found and res.partition.sizes == (1, 3)
        np.testing.assert_allclose(res.U, np.eye(4), atol=1e-12)

    def test_identity_refuted(self):
        assert not blockshift_canonical(np.eye(3)).found

    def test_is_blockshift(self):
        m = random_blockshift(np.random.default_rng(0), (2, 1, 2))
        assert is_blockshift(m, BlockPartition((2, 1, 2)))[0]
        assert not is_blockshift(m + matrix_unit(5, 1, 5), BlockPartition((2, 1, 2)))[0]

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(2, 8))
    def test_recovers_hidden_form(self, seed, n):
        rng = np.random.default_rng(seed)
        a = planted_positive(rng, FullUnitary(n))
        res = blockshift_canonical(a)
        assert res.found
        np.testing.assert_allclose(res.U @ a @ dagger(res.U), res.M, atol=1e-8 * fro_norm(a))
        ok, mass = is_blockshift(res.M, res.partition)
        assert ok and mass <= 1e-8 * fro_norm(a)


class TestSeparationIndex:
    def test_rank_one_unit(self):
        assert separation_index(3 * matrix_unit(4, 1, 3)).is_one

    def test_remark_matrix(self):
        res = separation_index(REMARK_MATRIX)
        assert not res.is_one and res.upper_bound == 2

    def test_hermitian_is_not_one(self, rng):
        x = rng.standard_normal((3, 3))
        assert not separation_index(x + x.T).is_one
        assert not separation_index(np.diag([1.0, 0, 0])).is_one

    @settings(max_examples=30)
    @given(seeds, st.integers(2, 6))
    def test_exact_decision(self, seed, n):
        rng = np.random.default_rng(seed)
        u = haar_sample(FullUnitary(n), seed)
        i, j = rng.choice(n, size=2, replace=False)
        c = complex(rng.standard_normal(), rng.standard_normal())
        a = u @ (c * matrix_unit(n, i + 1, j + 1)) @ dagger(u)
        assert separation_index(a).is_one
        # a rank-two nilpotent is never unitarily similar to c E_ij
        if n >= 4:
            b = u @ (matrix_unit(n, 2, 1) + matrix_unit(n, 4, 3)) @ dagger(u)
            assert not separation_index(b).is_one


class TestLieStructure:
    def test_embedded_su2(self):
        gens = [np.kron(1j * p, np.eye(2)) for p in (np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]))]
        b = lie_closure(gens)
        assert len(b) == 3 and is_su2(b)

    def test_e21_triple(self):
        b = lie_closure(su2_generators(matrix_unit(2, 2, 1)))
        assert len(b) == 3 and is_su2(b)

    def test_remark_matrix_is_not_su2(self):
        b = lie_closure(su2_generators(REMARK_MATRIX))
        assert len(b) != 3 or not is_su2(b)

    def test_abelian_is_not_su2(self):
        b = lie_closure([np.diag([1j, 0, 0]), np.diag([0, 1j, 0]), np.diag([0, 0, 1j])])
        assert len(b) == 3 and not is_su2(b)
        assert np.allclose(killing_form(b), 0)

    def test_standard_basis(self):
        assert is_su2(algebra_basis(SpecialUnitary(2)))

    def test_rejects_non_closed(self):
        from crange.groups import AlgebraBasis

        x = 1j * np.array([[0, 1], [1, 0]])
        y = 1j * np.array([[0, -1j], [1j, 0]])
        with pytest.raises(ValueError):
            is_su2(AlgebraBasis(np.array([x, y])))

    def test_rejects_non_skew(self):
        with pytest.raises(ValueError):
            lie_closure([np.eye(2)])

    @pytest.mark.parametrize("seed", range(20))
    def test_planted_rank_one_generate_su2(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 6))
        u = haar_sample(FullUnitary(n), seed)
        i, j = rng.choice(n, size=2, replace=False)
        c = complex(rng.standard_normal(), rng.standard_normal())
        a = u @ (c * matrix_unit(n, i + 1, j + 1)) @ dagger(u)
        assert separation_index(a).is_one
        b = lie_closure(su2_generators(a))
        assert len(b) == 3 and is_su2(b)
