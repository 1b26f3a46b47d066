import numpy as np
import pytest

from locclab import (
    BipartiteEnsemble,
    MEASURE_EOF,
    MEASURE_PURE,
    concurrence,
    entanglement,
    holevo_chi,
    is_ppt,
    pure_state_density,
    resolve_measure,
    shannon_entropy,
    validate_density,
    von_neumann_entropy,
)

from helpers import (
    PHI_MINUS,
    PHI_PLUS,
    PSI_MINUS,
    PSI_PLUS,
    bell,
    random_bipartite_density,
    random_density,
    random_pure_vector,
)

# frozen against direct -sum p log2 p evaluation
H_09_01 = 0.4689955935892812
H_BELL_SPECTRUM = 1.3567796494470397
CHI_ZERO_PLUS = 0.6008760366928562
EOF_WERNER_HALF = 0.11761887377091781


class TestShannonEntropy:
    def test_uniform_bit(self):
        assert shannon_entropy([0.5, 0.5]) == pytest.approx(1.0, abs=1e-12)

    def test_deterministic(self):
        assert shannon_entropy([1.0, 0.0]) == 0.0

    def test_biased(self):
        assert shannon_entropy([0.9, 0.1]) == pytest.approx(H_09_01, abs=1e-12)
        assert abs(shannon_entropy([0.9, 0.1]) - 0.4690) < 1e-4

    def test_negative_entry_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            shannon_entropy([1.1, -0.1])

    def test_normalization_rejected(self):
        with pytest.raises(ValueError, match="sum"):
            shannon_entropy([0.6, 0.6])


class TestVonNeumannEntropy:
    def test_maximally_mixed_qubit(self):
        assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0, abs=1e-12)

    def test_pure_state(self):
        assert von_neumann_entropy(bell(PHI_PLUS)) == pytest.approx(0.0, abs=1e-12)

    def test_bell_diagonal_spectrum(self):
        rho = sum(
            p * bell(v).matrix
            for p, v in zip((0.7, 0.1, 0.1, 0.1), (PHI_PLUS, PHI_MINUS, PSI_PLUS, PSI_MINUS))
        )
        value = von_neumann_entropy(validate_density(rho, 2, 2))
        assert value == pytest.approx(H_BELL_SPECTRUM, abs=1e-12)
        assert abs(value - 1.3568) < 1e-4

    def test_bounded_by_log_dim_with_equality_only_near_maximally_mixed(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            dim = int(rng.integers(2, 7))
            value = von_neumann_entropy(random_density(rng, dim))
            assert value <= np.log2(dim) + 1e-9
        assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0, abs=1e-9)
        nudged = np.diag([0.26, 0.24, 0.26, 0.24])
        assert von_neumann_entropy(nudged) < 2.0 - 1e-6

    def test_concavity(self):
        rng = np.random.default_rng(31)
        for _ in range(500):
            dim = int(rng.integers(2, 5))
            rho1 = random_density(rng, dim)
            rho2 = random_density(rng, dim)
            p = float(rng.uniform())
            mixed = von_neumann_entropy(p * rho1 + (1 - p) * rho2)
            assert mixed >= p * von_neumann_entropy(rho1) + (1 - p) * von_neumann_entropy(rho2) - 1e-9

    def test_pure_bipartite_marginals_have_equal_entropy(self):
        rng = np.random.default_rng(37)
        for dims in ((2, 2), (2, 3), (3, 4)):
            for _ in range(20):
                psi = pure_state_density(random_pure_vector(rng, dims[0] * dims[1]), *dims)
                s_a = von_neumann_entropy(psi.marginal("A"))
                s_b = von_neumann_entropy(psi.marginal("B"))
                assert abs(s_a - s_b) < 1e-9


class TestHolevoChi:
    def test_orthogonal_pure_states(self):
        members = [(0.5, np.diag([1.0, 0.0])), (0.5, np.diag([0.0, 1.0]))]
        assert holevo_chi(members) == pytest.approx(1.0, abs=1e-12)

    def test_identical_states(self):
        rho = np.eye(2) / 2
        assert holevo_chi([(0.5, rho), (0.5, rho)]) == pytest.approx(0.0, abs=1e-12)

    def test_zero_plus_ensemble(self):
        plus = np.full((2, 2), 0.5, dtype=complex)
        value = holevo_chi([(0.5, np.diag([1.0, 0.0])), (0.5, plus)])
        assert value == pytest.approx(CHI_ZERO_PLUS, abs=1e-12)
        assert abs(value - 0.6008) < 1e-4

    def test_positive_on_random_ensembles(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            n = int(rng.integers(2, 5))
            probs = rng.dirichlet(np.ones(n))
            members = [(float(p), random_density(rng, 3)) for p in probs]
            assert holevo_chi(members) >= -1e-9

    def test_bad_normalization_rejected(self):
        with pytest.raises(ValueError, match="sum"):
            holevo_chi([(0.7, np.eye(2) / 2)])


class TestEntanglement:
    def test_bell_state(self):
        assert entanglement(bell(PHI_PLUS)) == pytest.approx(1.0, abs=1e-12)

    def test_pure_product(self):
        assert entanglement(pure_state_density([1, 0, 0, 0], 2, 2)) == pytest.approx(0.0, abs=1e-12)

    def test_werner_mixture_concurrence_and_eof(self):
        rho = validate_density(0.5 * bell(PSI_MINUS).matrix + 0.5 * np.eye(4) / 4, 2, 2)
        assert concurrence(rho) == pytest.approx(0.25, abs=1e-9)
        assert entanglement(rho) == pytest.approx(EOF_WERNER_HALF, abs=1e-9)
        assert abs(entanglement(rho) - 0.1176) < 1e-3

    def test_wootters_matches_pure_measure_on_pure_states(self):
        rng = np.random.default_rng(43)
        for _ in range(100):
            psi = pure_state_density(random_pure_vector(rng, 4), 2, 2)
            eof = entanglement(psi, MEASURE_EOF)
            pure = entanglement(psi, MEASURE_PURE)
            assert abs(eof - pure) < 1e-7

    def test_mixed_large_dims_unavailable(self):
        rng = np.random.default_rng(47)
        rho = random_bipartite_density(rng, 2, 3)
        with pytest.raises(ValueError, match="measure unavailable"):
            entanglement(rho)

    def test_pure_selector_rejects_mixed(self):
        with pytest.raises(ValueError, match="measure unavailable"):
            entanglement(validate_density(np.eye(4) / 4, 2, 2), MEASURE_PURE)

    def test_auto_resolution(self):
        assert resolve_measure(bell(PHI_PLUS), "auto") == MEASURE_PURE
        assert resolve_measure(validate_density(np.eye(4) / 4, 2, 2), "auto") == MEASURE_EOF

    def test_unknown_selector(self):
        with pytest.raises(ValueError, match="selector"):
            entanglement(bell(PHI_PLUS), "nonsense")

    def test_range_on_random_mixed_two_qubit_states(self):
        rng = np.random.default_rng(53)
        for _ in range(50):
            value = entanglement(random_bipartite_density(rng, 2, 2))
            assert -1e-12 <= value <= 1.0 + 1e-12


class TestIsPpt:
    def test_bell_state_is_npt(self):
        flag, lowest = is_ppt(bell(PHI_PLUS))
        assert flag is False
        assert lowest == pytest.approx(-0.5, abs=1e-9)

    def test_maximally_mixed_is_ppt(self):
        flag, lowest = is_ppt(validate_density(np.eye(4) / 4, 2, 2))
        assert flag is True
        assert lowest == pytest.approx(0.25, abs=1e-12)

    def test_classical_mixture_is_ppt(self):
        flag, lowest = is_ppt(validate_density(np.diag([0.5, 0.0, 0.0, 0.5]), 2, 2))
        assert flag is True
        assert lowest == pytest.approx(0.0, abs=1e-12)


class TestBipartiteEnsemble:
    def test_probability_sum_enforced(self):
        with pytest.raises(ValueError, match="sum"):
            BipartiteEnsemble(((0.5, bell(PHI_PLUS)),))

    def test_mixed_dims_rejected(self):
        qubit = validate_density(np.eye(2) / 2, 2, 1)
        with pytest.raises(ValueError, match="dims"):
            BipartiteEnsemble(((0.5, bell(PHI_PLUS)), (0.5, qubit)))

    def test_zero_probability_member_allowed(self):
        ens = BipartiteEnsemble(((1.0, bell(PHI_PLUS)), (0.0, bell(PHI_MINUS))))
        assert ens.probabilities().tolist() == [1.0, 0.0]
