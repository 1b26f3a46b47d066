import numpy as np
import pytest

from locclab import (
    hermitian_eig,
    partial_trace,
    partial_transpose,
    pure_state_density,
    validate_density,
)

from helpers import PHI_PLUS, bell, random_bipartite_density, random_density, random_hermitian


class TestValidateDensity:
    def test_maximally_mixed_qubit(self):
        rho = validate_density(np.eye(2) / 2, 2, 1)
        assert rho.dim_a == 2 and rho.dim_b == 1
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2)

    def test_trace_deviation_rejected(self):
        with pytest.raises(ValueError, match="trace deviation"):
            validate_density(np.diag([0.25, 0.25]), 2, 1)

    def test_non_hermitian_rejected(self):
        bad = np.array([[0.5, 1.0], [0.0, 0.5]])
        with pytest.raises(ValueError, match="not Hermitian"):
            validate_density(bad, 2, 1)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            validate_density(np.eye(4) / 4, 2, 3)

    def test_large_negative_eigenvalue_rejected(self):
        with pytest.raises(ValueError, match="negative eigenvalue"):
            validate_density(np.diag([1.1, -0.1]), 2, 1)

    def test_rounding_negatives_clipped_and_renormalized(self):
        eps = 1e-11
        rho = validate_density(np.diag([1.0 + eps, -eps]), 2, 1)
        values = np.linalg.eigvalsh(rho.matrix)
        assert values.min() >= 0.0
        assert abs(np.trace(rho.matrix) - 1.0) < 1e-12

    def test_matrix_is_read_only(self):
        rho = validate_density(np.eye(2) / 2, 2, 1)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1.0


class TestPartialTrace:
    def test_bell_state_marginal_is_maximally_mixed(self):
        np.testing.assert_allclose(partial_trace(bell(PHI_PLUS), "A"), np.eye(2) / 2, atol=1e-12)

    def test_product_state_recovers_factor(self):
        rng = np.random.default_rng(3)
        rho_a = random_density(rng, 2)
        rho_b = random_density(rng, 3)
        rho = validate_density(np.kron(rho_a, rho_b), 2, 3)
        np.testing.assert_allclose(partial_trace(rho, "A"), rho_a, atol=1e-12)
        np.testing.assert_allclose(partial_trace(rho, "B"), rho_b, atol=1e-12)

    def test_classical_correlation_marginal(self):
        rho = validate_density(np.diag([0.5, 0.0, 0.0, 0.5]), 2, 2)
        np.testing.assert_allclose(partial_trace(rho, "B"), np.eye(2) / 2, atol=1e-12)

    def test_unit_trace_preserved_on_random_states(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            rho = random_bipartite_density(rng, 2, 3)
            for keep in ("A", "B"):
                assert abs(np.trace(partial_trace(rho, keep)) - 1.0) < 1e-9

    def test_bad_keep(self):
        with pytest.raises(ValueError, match="keep"):
            partial_trace(bell(PHI_PLUS), "C")


class TestHermitianEig:
    def test_diagonal(self):
        spec = hermitian_eig(np.diag([0.9, 0.1]))
        np.testing.assert_allclose(spec.eigenvalues, [0.1, 0.9])

    def test_pauli_x(self):
        pauli_x = np.array([[0.0, 1.0], [1.0, 0.0]])
        spec = hermitian_eig(pauli_x)
        np.testing.assert_allclose(spec.eigenvalues, [-1.0, 1.0])
        c = 2 ** -0.5
        np.testing.assert_allclose(np.abs(spec.eigenvectors[:, 0]), [c, c], atol=1e-12)
        # phase convention: first significant component real positive
        assert spec.eigenvectors[0, 0].real > 0
        assert abs(spec.eigenvectors[0, 0].imag) < 1e-12

    def test_degenerate_identity_gives_orthonormal_pair(self):
        spec = hermitian_eig(np.eye(2) / 2)
        np.testing.assert_allclose(spec.eigenvalues, [0.5, 0.5])
        gram = spec.eigenvectors.conj().T @ spec.eigenvectors
        np.testing.assert_allclose(gram, np.eye(2), atol=1e-12)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="not Hermitian"):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_reconstruction_and_orthonormality_random(self):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            dim = int(rng.integers(2, 9))
            mat = random_hermitian(rng, dim)
            spec = hermitian_eig(mat)
            rebuilt = (spec.eigenvectors * spec.eigenvalues) @ spec.eigenvectors.conj().T
            assert np.abs(rebuilt - mat).max() <= 1e-9
            gram = spec.eigenvectors.conj().T @ spec.eigenvectors
            assert np.abs(gram - np.eye(dim)).max() <= 1e-9

    def test_degenerate_cluster_reconstruction(self):
        # spectrum (0.3, 0.3, 0.4) hidden in a random basis
        rng = np.random.default_rng(9)
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        q, _ = np.linalg.qr(g)
        mat = q @ np.diag([0.3, 0.3, 0.4]) @ q.conj().T
        spec = hermitian_eig(mat)
        rebuilt = (spec.eigenvectors * spec.eigenvalues) @ spec.eigenvectors.conj().T
        assert np.abs(rebuilt - mat).max() <= 1e-9

    def test_eigenvalues_of_density_sum_to_one(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            rho = random_bipartite_density(rng, 2, 2)
            assert abs(hermitian_eig(rho.matrix).eigenvalues.sum() - 1.0) < 1e-9


class TestPartialTranspose:
    def test_bell_state_has_negative_eigenvalue(self):
        # independent oracle: the expected matrix written out by hand
        expected = 0.5 * np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
        )
        pt = partial_transpose(bell(PHI_PLUS), "B")
        np.testing.assert_allclose(pt, expected, atol=1e-12)
        assert abs(np.linalg.eigvalsh(pt).min() + 0.5) < 1e-12

    def test_product_state_stays_psd(self):
        rng = np.random.default_rng(5)
        rho = validate_density(np.kron(random_density(rng, 2), random_density(rng, 2)), 2, 2)
        assert np.linalg.eigvalsh(partial_transpose(rho, "B")).min() > -1e-12

    def test_diagonal_state_unchanged(self):
        rho = validate_density(np.diag([0.5, 0.0, 0.0, 0.5]), 2, 2)
        np.testing.assert_allclose(partial_transpose(rho, "B"), rho.matrix, atol=1e-15)

    def test_involution(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            rho = random_bipartite_density(rng, 2, 3)
            for party in ("A", "B"):
                twice = partial_transpose(
                    partial_transpose(rho, party), party, dims=(2, 3)
                )
                assert np.abs(twice - rho.matrix).max() <= 1e-12

    def test_hermiticity_preserved(self):
        rng = np.random.default_rng(13)
        rho = random_bipartite_density(rng, 3, 2)
        pt = partial_transpose(rho, "A")
        assert np.abs(pt - pt.conj().T).max() < 1e-12


class TestPureStateDensity:
    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError, match="norm"):
            pure_state_density([1.0, 1.0, 0.0, 0.0], 2, 2)

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            pure_state_density([1.0, 0.0], 2, 2)
