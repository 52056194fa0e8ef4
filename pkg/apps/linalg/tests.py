import numpy as np
from django.test import SimpleTestCase, override_settings

from apps.common.exceptions import DimensionMismatchError, InvalidOperatorError
from apps.common.rng import SeededGenerator
from apps.linalg.domain import DensityMatrix, PureState
from apps.linalg.utils import (
    apply_on_qubits,
    embed_operator,
    fidelity,
    is_unitary,
    partial_trace,
    purity,
    random_density_matrix,
    random_unitary,
    reorder_qubits,
    tensor,
    trace_distance,
)

X = np.array([[0, 1], [1, 0]])
Z = np.array([[1, 0], [0, -1]])
H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


class StateTest(SimpleTestCase):
    def test_pure_state_rejects_unnormalized_vector(self):
        with self.assertRaises(InvalidOperatorError):
            PureState([1, 1])

    def test_pure_state_rejects_non_power_of_two(self):
        with self.assertRaises(DimensionMismatchError):
            PureState(np.ones(3) / np.sqrt(3))

    def test_density_matrix_rejects_non_hermitian(self):
        with self.assertRaises(InvalidOperatorError):
            DensityMatrix([[0.5, 0.5], [0, 0.5]])

    def test_density_matrix_rejects_nan(self):
        with self.assertRaises(InvalidOperatorError):
            DensityMatrix([[np.nan, 0], [0, 1]])

    def test_subnormalized_branch_is_allowed_when_flagged(self):
        branch = DensityMatrix(np.diag([0.25, 0]), normalized=False)
        self.assertAlmostEqual(branch.trace, 0.25)
        self.assertAlmostEqual(branch.renormalized().trace, 1.0)
        with self.assertRaises(InvalidOperatorError):
            DensityMatrix(np.diag([0.25, 0]))

    def test_density_matrix_rejects_negative_eigenvalue(self):
        with self.assertRaisesMessage(InvalidOperatorError, "non positive"):
            DensityMatrix(np.diag([1.5, -0.5]))
        with self.assertRaises(InvalidOperatorError):
            DensityMatrix(np.diag([0.3, -0.1]), normalized=False)

    def test_zero_trace_branch_is_rejected(self):
        with self.assertRaises(InvalidOperatorError):
            DensityMatrix(np.zeros((2, 2)), normalized=False)

    @override_settings(SWITCHLAB={'EIGEN_TOLERANCE': 1e-3})
    def test_positivity_uses_eigen_tolerance_setting(self):
        rho = DensityMatrix(np.diag([1.0005, -0.0005]))
        self.assertTrue(rho.is_valid())
        self.assertFalse(rho.is_valid(tol=1e-6))

    def test_random_states_are_valid(self):
        rng = SeededGenerator(9)
        for trial in range(10):
            self.assertTrue(random_density_matrix(4, rng.spawn(trial)).is_valid())


class TensorTest(SimpleTestCase):
    def test_tensor_of_identities(self):
        np.testing.assert_array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_tensor_of_paulis(self):
        expected = np.array([[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]])
        np.testing.assert_array_equal(tensor(X, Z), expected)

    def test_tensor_is_associative(self):
        rng = SeededGenerator(3)
        a, b, c = (random_unitary(2, rng.spawn(k)) for k in range(3))
        np.testing.assert_allclose(tensor(tensor(a, b), c), tensor(a, tensor(b, c)), atol=1e-12)


class PartialTraceTest(SimpleTestCase):
    def test_bell_state_reduces_to_maximally_mixed(self):
        bell = PureState(np.array([1, 0, 0, 1]) / np.sqrt(2))
        reduced = partial_trace(bell, [2, 2], keep=[0])
        np.testing.assert_allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)

    def test_product_state_keeps_second_factor(self):
        zero = np.diag([1, 0])
        plus = np.full((2, 2), 0.5)
        reduced = partial_trace(DensityMatrix(np.kron(zero, plus)), [2, 2], keep=[1])
        np.testing.assert_allclose(reduced.matrix, plus, atol=1e-12)

    def test_trace_is_preserved(self):
        rho = random_density_matrix(8, SeededGenerator(11))
        for keep in ([0], [1, 2], [0, 2]):
            reduced = partial_trace(rho, [2, 2, 2], keep)
            self.assertAlmostEqual(reduced.trace, 1.0, delta=1e-12)

    def test_keeping_every_subsystem_returns_input(self):
        rho = random_density_matrix(8, SeededGenerator(12))
        reduced = partial_trace(rho, [2, 2, 2], keep=[0, 1, 2])
        np.testing.assert_allclose(reduced.matrix, rho.matrix, atol=1e-12)

    def test_mismatched_dims_raise(self):
        with self.assertRaises(DimensionMismatchError):
            partial_trace(DensityMatrix.maximally_mixed(2), [2, 3], keep=[0])


class DistanceTest(SimpleTestCase):
    def test_orthogonal_pure_states_are_at_distance_one(self):
        zero = PureState.basis(0, 1)
        one = PureState.basis(1, 1)
        self.assertAlmostEqual(trace_distance(zero, one), 1.0, delta=1e-12)

    def test_distance_to_itself_is_zero(self):
        rho = random_density_matrix(4, SeededGenerator(5))
        self.assertAlmostEqual(trace_distance(rho, rho), 0.0, delta=1e-12)

    def test_distance_is_symmetric_and_bounded(self):
        rng = SeededGenerator(7)
        for trial in range(20):
            rho = random_density_matrix(4, rng.spawn(2 * trial))
            sigma = random_density_matrix(4, rng.spawn(2 * trial + 1))
            forward = trace_distance(rho, sigma)
            self.assertAlmostEqual(forward, trace_distance(sigma, rho), delta=1e-12)
            self.assertTrue(0.0 <= forward <= 1.0)

    def test_triangle_inequality(self):
        rng = SeededGenerator(17)
        for trial in range(20):
            rho, sigma, tau = (random_density_matrix(4, rng.spawn(3 * trial + k)) for k in range(3))
            self.assertLessEqual(
                trace_distance(rho, tau),
                trace_distance(rho, sigma) + trace_distance(sigma, tau) + 1e-12,
            )

    def test_unitary_invariance(self):
        rng = SeededGenerator(19)
        for trial in range(10):
            rho = random_density_matrix(4, rng.spawn(3 * trial))
            sigma = random_density_matrix(4, rng.spawn(3 * trial + 1))
            u = random_unitary(4, rng.spawn(3 * trial + 2))
            rotated = trace_distance(u @ rho.matrix @ u.conj().T, u @ sigma.matrix @ u.conj().T)
            self.assertAlmostEqual(rotated, trace_distance(rho, sigma), delta=1e-10)

    def test_maximally_mixed_to_zero(self):
        distance = trace_distance(DensityMatrix.maximally_mixed(1), PureState.basis(0, 1))
        self.assertAlmostEqual(distance, 0.5, delta=1e-12)

    def test_invalid_operand_is_reported_not_clamped(self):
        with self.assertRaises(InvalidOperatorError):
            trace_distance(np.diag([1.5, -0.5]), np.diag([0, 1]))

    def test_fidelity_and_purity(self):
        plus = PureState(np.array([1, 1]) / np.sqrt(2))
        self.assertAlmostEqual(fidelity(plus.to_density(), plus), 1.0, delta=1e-12)
        self.assertAlmostEqual(purity(DensityMatrix.maximally_mixed(1)), 0.5, delta=1e-12)


class UnitaryTest(SimpleTestCase):
    def test_hadamard_is_unitary(self):
        self.assertTrue(is_unitary(H))

    def test_scaled_hadamard_is_not_unitary(self):
        self.assertFalse(is_unitary(1.0001 * H))

    def test_non_square_raises(self):
        with self.assertRaises(InvalidOperatorError):
            is_unitary(np.ones((2, 3)))

    def test_random_unitaries_are_unitary(self):
        rng = SeededGenerator(1)
        for trial in range(20):
            self.assertTrue(is_unitary(random_unitary(4, rng.spawn(trial))))

    def test_same_seed_gives_same_unitary(self):
        np.testing.assert_array_equal(random_unitary(2, SeededGenerator(42)), random_unitary(2, SeededGenerator(42)))


class QubitLayoutTest(SimpleTestCase):
    def test_apply_on_second_qubit(self):
        state = np.kron([1, 0], [1, 0]).astype(complex)
        np.testing.assert_allclose(apply_on_qubits(X, state, [1], 2), np.kron([1, 0], [0, 1]))

    def test_embed_matches_kron(self):
        np.testing.assert_allclose(embed_operator(Z, [0], 2), np.kron(Z, np.eye(2)))
        np.testing.assert_allclose(embed_operator(Z, [1], 2), np.kron(np.eye(2), Z))

    def test_reorder_moves_qubits(self):
        state = np.kron(np.kron([0, 1], [1, 0]), [1, 0]).astype(complex)
        # qubit 0 -> position 2
        moved = reorder_qubits(state, [2, 0, 1])
        np.testing.assert_allclose(moved, np.kron(np.kron([1, 0], [1, 0]), [0, 1]))
