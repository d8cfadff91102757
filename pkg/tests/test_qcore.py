"""Quantum-information primitives: traces, entropies, validation."""

import math

import numpy as np
import pytest

from helpers import random_density, thermal_qubit_matrix

from heatrev import pairtls
from heatrev.qcore import (
    CorrelationTerm,
    DensityOperator,
    PositivityError,
    matrix_from_payload,
    matrix_to_payload,
    mutual_information,
    partial_trace,
    relative_entropy,
    validate_density,
    von_neumann_entropy,
)


def bell_like_state():
    # (|01> + |10>)/sqrt(2)
    v = np.zeros(4, dtype=complex)
    v[1] = v[2] = 1.0 / math.sqrt(2.0)
    return DensityOperator(np.outer(v, v.conj()), tensor_layout=(2, 2))


class TestPartialTrace:
    def test_product_state_factorizes(self):
        rng = np.random.default_rng(1)
        r1 = random_density(rng, 2).matrix
        r2 = random_density(rng, 3).matrix
        rho = DensityOperator(np.kron(r1, r2), tensor_layout=(2, 3))
        np.testing.assert_allclose(partial_trace(rho, keep=(0,)).matrix, r1, atol=1e-13)
        np.testing.assert_allclose(partial_trace(rho, keep=(1,)).matrix, r2, atol=1e-13)

    @pytest.mark.parametrize("alpha", [0.0, 0.0284, -0.02, 0.01 + 0.02j])
    def test_pair_state_locals_are_thermal(self, alpha):
        """The correlation term vanishes under either partial trace, leaving
        each qubit exactly thermal at beta_S."""
        rho = pairtls.pair_initial_state(pairtls.PairConfig(3.5, alpha))
        expected = thermal_qubit_matrix(3.5)
        for sub in (0, 1):
            np.testing.assert_allclose(
                partial_trace(rho, keep=(sub,)).matrix, expected, atol=1e-14
            )

    def test_bell_like_reduces_to_maximally_mixed(self):
        reduced = partial_trace(bell_like_state(), keep=(1,))
        np.testing.assert_allclose(reduced.matrix, np.eye(2) / 2.0, atol=1e-14)

    def test_three_subsystems_keep_two(self):
        rng = np.random.default_rng(2)
        parts = [random_density(rng, 2).matrix for _ in range(3)]
        rho = DensityOperator(
            np.kron(np.kron(parts[0], parts[1]), parts[2]), tensor_layout=(2, 2, 2)
        )
        kept = partial_trace(rho, keep=(0, 2))
        np.testing.assert_allclose(kept.matrix, np.kron(parts[0], parts[2]), atol=1e-13)
        assert kept.tensor_layout == (2, 2)

    def test_trace_preserved(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            rho = random_density(rng, 8, tensor_layout=(2, 4))
            reduced = partial_trace(rho, keep=(0,))
            assert abs(np.trace(reduced.matrix) - 1.0) <= 1e-12

    def test_missing_layout_rejected(self):
        rho = DensityOperator(np.eye(4) / 4.0)
        with pytest.raises(ValueError, match="tensor_layout"):
            partial_trace(rho, keep=(0,))

    def test_index_out_of_range(self):
        rho = DensityOperator(np.eye(4) / 4.0, tensor_layout=(2, 2))
        with pytest.raises(ValueError, match="out of range"):
            partial_trace(rho, keep=(2,))


class TestVonNeumannEntropy:
    def test_pure_state_zero(self):
        v = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
        assert von_neumann_entropy(DensityOperator(np.outer(v, v))) == 0.0

    def test_maximally_mixed(self):
        assert von_neumann_entropy(DensityOperator(np.eye(5) / 5.0)) == pytest.approx(
            math.log(5.0), abs=1e-13
        )

    def test_pair_boundary_state_value(self):
        """Eigenvalues {1/Z, x^2/Z, 2x/Z, 0} at |alpha| = alpha_max; the zero
        eigenvalue contributes nothing."""
        beta = 0.7
        amax = pairtls.alpha_max(beta)
        rho = pairtls.pair_initial_state(pairtls.PairConfig(beta, amax))
        x = math.exp(-beta)
        z = (1.0 + x) ** 2
        eigs = [1.0 / z, x * x / z, x / z + amax]
        oracle = -sum(p * math.log(p) for p in eigs)
        value = von_neumann_entropy(rho)
        assert value == pytest.approx(oracle, abs=1e-13)
        assert value == pytest.approx(0.9635499107015573, abs=1e-12)
        # five-decimal value quoted for this state
        assert value == pytest.approx(0.96355, abs=5e-6)

    def test_additive_on_products(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            r1 = random_density(rng, 3)
            r2 = random_density(rng, 4)
            prod = DensityOperator(np.kron(r1.matrix, r2.matrix), tensor_layout=(3, 4))
            assert von_neumann_entropy(prod) == pytest.approx(
                von_neumann_entropy(r1) + von_neumann_entropy(r2), abs=1e-10
            )


class TestRelativeEntropy:
    def test_self_is_zero(self):
        rng = np.random.default_rng(5)
        rho = random_density(rng, 4)
        assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-12)

    def test_thermal_vs_itself(self):
        rho = pairtls.pair_thermal_state(1.3)
        assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-13)

    def test_thermal_reference_identity(self):
        """Against a thermal reference, S(rho||sigma) = -S(rho) + beta E + ln Z."""
        rng = np.random.default_rng(6)
        h = np.diag([0.0, 1.0, 1.0, 2.0])
        for beta in (0.5, 1.3, 3.5):
            weights = np.exp(-beta * np.diag(h))
            zfun = weights.sum()
            sigma = DensityOperator(np.diag(weights / zfun).astype(complex))
            for _ in range(10):
                rho = random_density(rng, 4)
                energy = rho.expectation(h)
                expected = -von_neumann_entropy(rho) + beta * energy + math.log(zfun)
                assert relative_entropy(rho, sigma) == pytest.approx(expected, abs=1e-10)

    def test_support_violation_is_inf(self):
        v = np.array([1.0, 0.0], dtype=complex)
        pure = DensityOperator(np.outer(v, v))
        mixed = DensityOperator(np.eye(2) / 2.0)
        assert relative_entropy(mixed, pure) == math.inf
        assert relative_entropy(pure, mixed) == pytest.approx(math.log(2.0), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            relative_entropy(DensityOperator(np.eye(2) / 2), DensityOperator(np.eye(3) / 3))

    def test_nonnegative_on_random_pairs(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            rho = random_density(rng, 4)
            sigma = random_density(rng, 4)
            assert relative_entropy(rho, sigma) >= 0.0


class TestMutualInformation:
    def test_product_state_zero(self):
        rng = np.random.default_rng(8)
        r1 = random_density(rng, 2).matrix
        r2 = random_density(rng, 2).matrix
        rho = DensityOperator(np.kron(r1, r2), tensor_layout=(2, 2))
        assert mutual_information(rho) == pytest.approx(0.0, abs=1e-10)

    def test_bell_state_two_ln_two(self):
        assert mutual_information(bell_like_state()) == pytest.approx(
            2.0 * math.log(2.0), abs=1e-12
        )

    def test_pair_state_pinned_value(self):
        """Value frozen from direct 4x4 eigenvalue computation."""
        rho = pairtls.pair_initial_state(pairtls.PairConfig(3.5, 0.0284))
        s1 = von_neumann_entropy(partial_trace(rho, keep=(0,)))
        s2 = von_neumann_entropy(partial_trace(rho, keep=(1,)))
        oracle = s1 + s2 - von_neumann_entropy(rho)
        value = mutual_information(rho)
        assert value == oracle
        assert value == pytest.approx(0.03902124477978308, abs=1e-12)
        assert value > 0.0

    def test_subadditivity_on_random_states(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            rho = random_density(rng, 4, tensor_layout=(2, 2))
            assert mutual_information(rho) >= -1e-10

    def test_layout_required(self):
        with pytest.raises(ValueError, match="tensor_layout"):
            mutual_information(DensityOperator(np.eye(4) / 4.0))
        with pytest.raises(ValueError, match="2 subsystems"):
            mutual_information(DensityOperator(np.eye(8) / 8.0, tensor_layout=(2, 2, 2)))


class TestValidateDensity:
    def test_maximally_mixed_ok(self):
        verdict = validate_density(np.eye(2) / 2.0)
        assert verdict.ok and not verdict.violations

    def test_over_bound_correlation_fails_positivity(self):
        beta = 3.5
        amax = pairtls.alpha_max(beta)
        x = math.exp(-beta)
        z = (1.0 + x) ** 2
        m = np.diag([1.0, x, x, x * x]).astype(complex) / z
        m[1, 2] += 1.01 * amax
        m[2, 1] += 1.01 * amax
        verdict = validate_density(m)
        assert not verdict.ok
        assert verdict.min_eigenvalue == pytest.approx(-0.01 * amax, rel=1e-6)
        assert any("eigenvalue" in v for v in verdict.violations)

    def test_boundary_correlation_ok(self):
        """At |alpha| = alpha_max the smallest eigenvalue is exactly zero."""
        beta = 3.5
        rho = pairtls.pair_initial_state(pairtls.PairConfig(beta, pairtls.alpha_max(beta)))
        verdict = validate_density(rho.matrix)
        assert verdict.ok
        assert abs(verdict.min_eigenvalue) <= 1e-12

    def test_reports_all_defects(self):
        m = np.array([[0.7, 0.1j], [0.2j, 0.2]], dtype=complex)
        verdict = validate_density(m)
        assert not verdict.ok
        assert verdict.hermiticity_defect > 1e-12
        assert verdict.trace_defect > 1e-12

    def test_non_square_rejected(self):
        with pytest.raises(ValueError, match="square"):
            validate_density(np.zeros((2, 3)))


class TestDensityOperator:
    def test_positivity_error_carries_eigenvalue(self):
        m = np.diag([1.2, -0.2]).astype(complex)
        with pytest.raises(PositivityError) as info:
            DensityOperator(m)
        assert info.value.min_eigenvalue == pytest.approx(-0.2, abs=1e-12)

    def test_trace_violation_rejected(self):
        with pytest.raises(ValueError, match="trace"):
            DensityOperator(np.eye(2).astype(complex))

    def test_matrix_is_readonly(self):
        rho = DensityOperator(np.eye(2) / 2.0)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1.0

    def test_layout_product_must_match(self):
        with pytest.raises(ValueError, match="multiply"):
            DensityOperator(np.eye(4) / 4.0, tensor_layout=(2, 3))


class TestCorrelationTerm:
    def test_pair_term_accepted(self):
        chi = pairtls.pair_correlation_term(0.01 + 0.02j)
        assert chi.tensor_layout == (2, 2)

    def test_nonzero_local_trace_rejected(self):
        m = np.diag([0.5, -0.5, 0.25, -0.25]).astype(complex)
        with pytest.raises(ValueError, match="partial trace"):
            CorrelationTerm(m, tensor_layout=(2, 2))

    def test_traceful_rejected(self):
        with pytest.raises(ValueError, match="traceless"):
            CorrelationTerm(np.eye(2).astype(complex))

    def test_single_system_coherence_allowed(self):
        """Without subsystem structure only Hermitian + traceless is required."""
        m = np.zeros((3, 3), dtype=complex)
        m[1, 2] = m[2, 1] = 0.1
        chi = CorrelationTerm(m)
        assert chi.dim == 3


class TestMatrixPayload:
    def test_roundtrip(self):
        rng = np.random.default_rng(10)
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        back = matrix_from_payload(matrix_to_payload(m))
        np.testing.assert_array_equal(back, m)

    def test_malformed_rejected(self):
        with pytest.raises(ValueError, match="shape mismatch"):
            matrix_from_payload({"dim": 2, "re": [[1.0]], "im": [[0.0]]})
        with pytest.raises(ValueError, match="malformed"):
            matrix_from_payload({"re": [[1.0]]})
