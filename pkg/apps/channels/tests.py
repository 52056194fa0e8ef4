import numpy as np
from django.test import SimpleTestCase

from apps.channels.domain import BipartiteBox, KrausChannel, UnitaryBox
from apps.channels.library import (
    CNOT,
    CSWAP,
    SWAP,
    X,
    Z,
    amplitude_damping,
    bitflip,
    controlled,
    depolarizing,
    gate_matrix,
    phaseflip,
    resolve_box,
)
from apps.channels.utils import (
    apply_channel,
    channel_deviation,
    dephase_qubit,
    is_non_signaling,
    random_cptp_channel,
    random_non_signaling_box,
    verify_cptp,
)
from apps.common.exceptions import DimensionMismatchError, InvalidOperatorError
from apps.common.rng import SeededGenerator
from apps.linalg.domain import DensityMatrix, PureState
from apps.linalg.utils import random_density_matrix


class UnitaryBoxTest(SimpleTestCase):
    def test_non_unitary_matrix_is_rejected_with_deviation(self):
        with self.assertRaisesMessage(InvalidOperatorError, "écart max"):
            UnitaryBox(np.array([[1, 1], [0, 1]]), name='U')

    def test_qubit_count(self):
        self.assertEqual(UnitaryBox(CNOT).qubit_count, 2)


class KrausChannelTest(SimpleTestCase):
    def test_noise_channels_are_cptp(self):
        for channel in (bitflip(0.3), phaseflip(0.4), depolarizing(0.7), amplitude_damping(0.2)):
            report = verify_cptp(channel)
            self.assertTrue(report.passed, channel.name)
            self.assertLess(report.deviation, 1e-10)

    def test_incomplete_family_fails(self):
        channel = KrausChannel((np.sqrt(0.5) * np.eye(2),))
        report = verify_cptp(channel)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.deviation, 0.5)

    def test_depolarizing_one_is_completely_depolarizing(self):
        rho = random_density_matrix(2, SeededGenerator(2))
        output = apply_channel(depolarizing(1.0), rho)
        np.testing.assert_allclose(output.matrix, np.eye(2) / 2, atol=1e-12)

    def test_bitflip_one_is_x(self):
        self.assertLess(channel_deviation(bitflip(1.0), KrausChannel.from_unitary(X)), 1e-12)

    def test_probability_out_of_range(self):
        with self.assertRaises(InvalidOperatorError):
            bitflip(1.5)

    def test_random_stinespring_channels_are_cptp(self):
        rng = SeededGenerator(9)
        for trial in range(20):
            self.assertTrue(verify_cptp(random_cptp_channel(1, rng.spawn(trial))).passed)

    def test_apply_channel_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            apply_channel(bitflip(0.1), DensityMatrix.maximally_mixed(2))

    def test_apply_channel_preserves_trace(self):
        rng = SeededGenerator(21)
        for trial in range(20):
            channel = random_cptp_channel(1, rng.spawn(2 * trial))
            rho = random_density_matrix(2, rng.spawn(2 * trial + 1))
            self.assertAlmostEqual(apply_channel(channel, rho).trace, 1.0, delta=1e-10)

    def test_identity_and_x_channels(self):
        rho = random_density_matrix(2, SeededGenerator(22))
        np.testing.assert_allclose(apply_channel(KrausChannel.identity(1), rho).matrix, rho.matrix, atol=1e-12)
        flipped = apply_channel(KrausChannel.from_unitary(X, name='X'), rho)
        np.testing.assert_allclose(flipped.matrix, X @ rho.matrix @ X, atol=1e-12)

    def test_bitflip_matches_hand_expansion(self):
        rho = random_density_matrix(2, SeededGenerator(23))
        for p in (0.0, 0.25, 0.6, 1.0):
            expected = (1 - p) * rho.matrix + p * X @ rho.matrix @ X
            np.testing.assert_allclose(apply_channel(bitflip(p), rho).matrix, expected, atol=1e-12)

    def test_apply_channel_rejects_non_trace_preserving_family(self):
        with self.assertRaisesMessage(InvalidOperatorError, "ne conserve pas la trace"):
            apply_channel(KrausChannel((2 * X,)), DensityMatrix.maximally_mixed(1))

    def test_postselection_element_is_an_instrument(self):
        bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
        element = KrausChannel((np.outer(bell, bell),), deterministic=False)
        report = verify_cptp(element)
        self.assertTrue(report.passed)
        self.assertFalse(report.deterministic)


class LibraryTest(SimpleTestCase):
    def test_cnot_entangles_plus_zero(self):
        plus_zero = np.kron(np.array([1, 1]) / np.sqrt(2), [1, 0])
        np.testing.assert_allclose(CNOT @ plus_zero, np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-12)

    def test_controlled_x_is_cnot(self):
        np.testing.assert_array_equal(controlled(X), CNOT)

    def test_register_swap(self):
        np.testing.assert_array_equal(gate_matrix('SWAP', 2), SWAP)
        np.testing.assert_array_equal(gate_matrix('CSWAP', 3), CSWAP)
        ab = np.kron(np.kron([1, 0], [0, 1]), np.kron([0, 1], [0, 1]))
        ba = np.kron(np.kron([0, 1], [0, 1]), np.kron([1, 0], [0, 1]))
        np.testing.assert_array_equal(gate_matrix('SWAP', 4) @ ab, ba)

    def test_gate_arity_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            gate_matrix('CNOT', 3)

    def test_resolve_box(self):
        self.assertIsInstance(resolve_box('Z'), UnitaryBox)
        self.assertEqual(resolve_box('depolarizing(0.5)').name, 'depolarizing(0.5)')
        with self.assertRaises(KeyError):
            resolve_box('FROB')


class NonSignalingTest(SimpleTestCase):
    def test_random_product_boxes_pass(self):
        rng = SeededGenerator(21)
        for trial in range(50):
            box = BipartiteBox.product(
                random_cptp_channel(1, rng.spawn(2 * trial)),
                random_cptp_channel(1, rng.spawn(2 * trial + 1)),
            )
            self.assertTrue(is_non_signaling(box).passed)

    def test_mixture_of_products_passes(self):
        box = random_non_signaling_box(1, 1, SeededGenerator(4))
        self.assertTrue(is_non_signaling(box).passed)

    def test_cnot_signals_from_control_to_target(self):
        report = is_non_signaling(BipartiteBox(KrausChannel.from_unitary(CNOT), 1, 1))
        self.assertFalse(report.passed)
        self.assertFalse(report.a_to_b_passed)
        self.assertTrue(report.b_to_a_passed)
        # inputs |0⟩ et |1⟩ sur A : sorties |0⟩⟨0| et |1⟩⟨1| sur B, écart 1 entre les deux
        self.assertAlmostEqual(report.a_to_b_deviation, 0.5, delta=1e-12)
        self.assertGreater(report.a_to_b_deviation, 0.1)

    def test_swap_signals_both_ways(self):
        report = is_non_signaling(BipartiteBox(KrausChannel.from_unitary(SWAP), 1, 1))
        self.assertFalse(report.a_to_b_passed)
        self.assertFalse(report.b_to_a_passed)

    def test_bad_partition(self):
        with self.assertRaises(DimensionMismatchError):
            BipartiteBox(KrausChannel.from_unitary(CNOT), 1, 2)


class DephasingTest(SimpleTestCase):
    def test_dephasing_removes_control_coherence(self):
        plus = PureState(np.array([1, 1]) / np.sqrt(2))
        dephased = dephase_qubit(plus, 0)
        np.testing.assert_allclose(dephased.matrix, np.eye(2) / 2, atol=1e-12)

    def test_dephasing_keeps_diagonal_of_larger_register(self):
        rho = random_density_matrix(4, SeededGenerator(8))
        dephased = dephase_qubit(rho, 1)
        np.testing.assert_allclose(np.diag(dephased.matrix), np.diag(rho.matrix), atol=1e-12)
        self.assertAlmostEqual(abs(dephased.matrix[0, 1]), 0.0)

    def test_dephasing_is_idempotent_and_trace_preserving(self):
        rng = SeededGenerator(24)
        for trial in range(10):
            rho = random_density_matrix(8, rng.spawn(trial))
            for qubit in range(3):
                once = dephase_qubit(rho, qubit)
                np.testing.assert_allclose(dephase_qubit(once, qubit).matrix, once.matrix, atol=1e-12)
                self.assertAlmostEqual(once.trace, 1.0, delta=1e-12)

    def test_dephasing_bell_pair_gives_classical_correlation(self):
        bell = PureState(np.array([1, 0, 0, 1]) / np.sqrt(2))
        dephased = dephase_qubit(bell, 0)
        np.testing.assert_allclose(dephased.matrix, np.diag([0.5, 0, 0, 0.5]), atol=1e-12)
