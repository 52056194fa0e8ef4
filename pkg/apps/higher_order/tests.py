import numpy as np
from django.test import SimpleTestCase

from apps.channels.domain import KrausChannel, UnitaryBox
from apps.channels.library import S, X, Z, bitflip, depolarizing, phaseflip
from apps.channels.utils import (
    apply_channel,
    choi_matrix,
    dephase_qubit,
    random_cptp_channel,
    random_non_signaling_box,
    random_unitary_channel,
    verify_cptp,
)
from apps.common.exceptions import DimensionMismatchError, InvalidOperatorError, UnknownConstructionError
from apps.common.rng import SeededGenerator
from apps.higher_order.admissibility import (
    admissibility_check,
    channel_construction,
    linearity_deviation,
    local_application,
)
from apps.higher_order.domain import ControlBit, ControlState
from apps.higher_order.utils import (
    classical_oracle,
    classical_oracle_channel,
    quantum_control_output,
    quantum_control_unitary,
    reduce_to_classical,
    switch_compose,
    switched_channel,
    switched_unitary,
)
from apps.linalg.domain import DensityMatrix, PureState
from apps.linalg.utils import (
    fidelity,
    is_unitary,
    partial_trace,
    purity,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    trace_distance,
)

P0 = np.diag([1, 0])
P1 = np.diag([0, 1])


def random_control(rng):
    return ControlState(*random_pure_state(2, rng).amplitudes)


class ControlTest(SimpleTestCase):
    def test_control_must_be_normalized(self):
        with self.assertRaises(InvalidOperatorError):
            ControlState(1, 1)

    def test_bits_embed_as_basis_states(self):
        self.assertEqual(ControlState.from_bit(0), ControlState(1, 0))
        self.assertEqual(ControlState.from_bit(ControlBit(1)), ControlState(0, 1))
        with self.assertRaises(InvalidOperatorError):
            ControlBit(2)


class SwitchComposeTest(SimpleTestCase):
    def test_one_gives_f_then_g(self):
        rng = SeededGenerator(1)
        f, g = random_unitary(2, rng.spawn(0)), random_unitary(2, rng.spawn(1))
        np.testing.assert_allclose(switch_compose(1, f, g).matrix, g @ f, atol=1e-12)
        np.testing.assert_allclose(switch_compose(0, f, g).matrix, f @ g, atol=1e-12)

    def test_identity_boxes(self):
        for x in (0, 1):
            np.testing.assert_array_equal(switch_compose(x, np.eye(2), np.eye(2)).matrix, np.eye(2))

    def test_zero_with_x_and_z(self):
        np.testing.assert_allclose(switch_compose(0, X, Z).matrix, [[0, -1], [1, 0]])

    def test_noisy_boxes_compose_as_channels(self):
        composed = switch_compose(1, bitflip(0.3), UnitaryBox(Z))
        self.assertIsInstance(composed, KrausChannel)
        rho = random_density_matrix(2, SeededGenerator(2))
        expected = Z @ apply_channel(bitflip(0.3), rho).matrix @ Z
        np.testing.assert_allclose(apply_channel(composed, rho).matrix, expected, atol=1e-12)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            switch_compose(1, X, np.eye(4))


class ClassicalOracleTest(SimpleTestCase):
    def test_control_one_is_first_term(self):
        rng = SeededGenerator(3)
        f, g = random_unitary(2, rng.spawn(0)), random_unitary(2, rng.spawn(1))
        rho1, rho2 = random_density_matrix(2, rng.spawn(2)), random_density_matrix(2, rng.spawn(3))
        output = classical_oracle(f, g, ControlState.from_bit(1), rho1, rho2)
        expected = np.kron(f @ rho1.matrix @ f.conj().T, g @ rho2.matrix @ g.conj().T)
        np.testing.assert_allclose(output.matrix, expected, atol=1e-12)

    def test_equal_boxes_ignore_control(self):
        rng = SeededGenerator(4)
        u = random_unitary(2, rng.spawn(0))
        rho1, rho2 = random_density_matrix(2, rng.spawn(1)), random_density_matrix(2, rng.spawn(2))
        first = classical_oracle(u, u, ControlState.from_bit(0), rho1, rho2)
        second = classical_oracle(u, u, ControlState.plus(), rho1, rho2)
        np.testing.assert_allclose(first.matrix, second.matrix, atol=1e-12)

    def test_plus_control_with_x_and_z(self):
        zero = np.diag([1, 0])
        output = classical_oracle(X, Z, ControlState.plus(), zero, zero)
        expected = 0.5 * np.kron(P1, P0) + 0.5 * np.kron(P0, P1)
        np.testing.assert_allclose(output.matrix, expected, atol=1e-12)

    def test_channel_form_matches_state_form(self):
        rng = SeededGenerator(5)
        for trial in range(10):
            trial_rng = rng.spawn(trial)
            f, g = random_unitary(2, trial_rng.spawn(0)), random_unitary(2, trial_rng.spawn(1))
            phi = random_control(trial_rng.spawn(2))
            rho1, rho2 = random_density_matrix(2, trial_rng.spawn(3)), random_density_matrix(2, trial_rng.spawn(4))
            joint = DensityMatrix(np.kron(np.outer(phi.vector, phi.vector.conj()), np.kron(rho1.matrix, rho2.matrix)))
            channel = classical_oracle_channel(UnitaryBox(f), UnitaryBox(g))
            self.assertTrue(verify_cptp(channel).passed)
            self.assertLess(
                trace_distance(apply_channel(channel, joint), classical_oracle(f, g, phi, rho1, rho2)), 1e-10
            )


class QuantumControlTest(SimpleTestCase):
    def test_identity_boxes_give_identity(self):
        np.testing.assert_array_equal(quantum_control_unitary(np.eye(2), np.eye(2)).matrix, np.eye(8))

    def test_blocks(self):
        rng = SeededGenerator(6)
        f, g = random_unitary(2, rng.spawn(0)), random_unitary(2, rng.spawn(1))
        w = quantum_control_unitary(f, g).matrix
        np.testing.assert_allclose(w[4:, 4:], np.kron(f, g), atol=1e-12)
        np.testing.assert_allclose(w[:4, :4], np.kron(g, f), atol=1e-12)
        np.testing.assert_allclose(w[:4, 4:], 0, atol=1e-12)

    def test_x_and_z_explicit(self):
        expected = np.zeros((8, 8), dtype=complex)
        xz, zx = np.kron(X, Z), np.kron(Z, X)
        for i in range(4):
            for j in range(4):
                expected[4 + i, 4 + j] = xz[i, j]
                expected[i, j] = zx[i, j]
        np.testing.assert_array_equal(quantum_control_unitary(X, Z).matrix, expected)

    def test_random_boxes_are_unitary(self):
        rng = SeededGenerator(7)
        for size in (2, 4):
            for trial in range(10):
                f = random_unitary(size, rng.spawn(2 * trial + size))
                g = random_unitary(size, rng.spawn(2 * trial + size + 1))
                self.assertTrue(is_unitary(quantum_control_unitary(f, g).matrix, 1e-10))


class SwitchedUnitaryTest(SimpleTestCase):
    def test_basis_controls_reproduce_switch(self):
        rng = SeededGenerator(8)
        for trial in range(10):
            trial_rng = rng.spawn(trial)
            f, g = random_unitary(2, trial_rng.spawn(0)), random_unitary(2, trial_rng.spawn(1))
            psi = random_pure_state(2, trial_rng.spawn(2)).amplitudes
            switched = switched_unitary(f, g).matrix
            for x in (0, 1):
                control = np.eye(2)[x]
                expected = np.kron(control, switch_compose(x, f, g).matrix @ psi)
                self.assertLessEqual(np.max(np.abs(switched @ np.kron(control, psi) - expected)), 1e-12)

    def test_plus_control_with_x_and_z(self):
        output = switched_unitary(X, Z).matrix @ np.kron(ControlState.plus().vector, [1, 0])
        expected = (np.kron([0, 1], Z @ X @ [1, 0]) + np.kron([1, 0], X @ Z @ [1, 0])) / np.sqrt(2)
        np.testing.assert_allclose(output, expected, atol=1e-12)
        # ZX = -XZ : les deux ordres ne diffèrent que par un signe, le contrôle bascule sur |-⟩
        control = partial_trace(PureState(output), [2, 2], keep=[0])
        self.assertAlmostEqual(fidelity(control, ControlState.minus().as_pure_state()), 1.0, delta=1e-12)

    def test_commuting_boxes_leave_control_pure(self):
        psi = random_pure_state(2, SeededGenerator(9)).amplitudes
        output = switched_unitary(Z, S).matrix @ np.kron(ControlState.plus().vector, psi)
        product = np.kron(ControlState.plus().vector, S @ Z @ psi)
        self.assertAlmostEqual(abs(np.vdot(product, output)), 1.0, delta=1e-10)
        control = partial_trace(PureState(output), [2, 2], keep=[0])
        self.assertAlmostEqual(purity(control), 1.0, delta=1e-9)

    def test_dephased_control_gives_classical_mixture(self):
        rng = SeededGenerator(10)
        f, g = random_unitary(2, rng.spawn(0)), random_unitary(2, rng.spawn(1))
        phi = random_control(rng.spawn(2))
        psi = random_pure_state(2, rng.spawn(3)).amplitudes
        output = PureState(switched_unitary(f, g).matrix @ np.kron(phi.vector, psi))
        target = partial_trace(dephase_qubit(output, 0), [2, 2], keep=[1])
        w0, w1 = phi.weights
        fg, gf = g @ f @ psi, f @ g @ psi
        expected = w1 * np.outer(fg, fg.conj()) + w0 * np.outer(gf, gf.conj())
        np.testing.assert_allclose(target.matrix, expected, atol=1e-10)


class SwitchedChannelTest(SimpleTestCase):
    def test_unitary_inputs_reduce_to_switched_unitary(self):
        channel = switched_channel(UnitaryBox(X), UnitaryBox(Z))
        self.assertEqual(len(channel.kraus_ops), 1)
        np.testing.assert_allclose(channel.kraus_ops[0], switched_unitary(X, Z).matrix, atol=1e-12)

    def test_noise_inputs_are_cptp(self):
        report = verify_cptp(switched_channel(bitflip(0.3), phaseflip(0.4)))
        self.assertTrue(report.passed)
        self.assertLess(report.deviation, 1e-10)

    def test_depolarized_target_is_maximally_mixed(self):
        channel = switched_channel(depolarizing(1.0), depolarizing(1.0))
        rng = SeededGenerator(11)
        for trial in range(5):
            rho = random_density_matrix(4, rng.spawn(trial))
            target = partial_trace(apply_channel(channel, rho), [2, 2], keep=[1])
            np.testing.assert_allclose(target.matrix, np.eye(2) / 2, atol=1e-12)

    def test_random_unitary_pairs_are_cptp(self):
        rng = SeededGenerator(12)
        for trial in range(100):
            f = random_unitary_channel(1, rng.spawn(2 * trial))
            g = random_unitary_channel(1, rng.spawn(2 * trial + 1))
            self.assertLess(verify_cptp(switched_channel(f, g)).deviation, 1e-9)

    def test_non_cptp_input_is_rejected(self):
        with self.assertRaises(InvalidOperatorError):
            switched_channel(KrausChannel((0.5 * np.eye(2),)), bitflip(0.1))


class ReduceToClassicalTest(SimpleTestCase):
    def test_random_instances_match_classical_oracle(self):
        rng = SeededGenerator(13)
        for trial in range(100):
            trial_rng = rng.spawn(trial)
            f, g = random_unitary(2, trial_rng.spawn(0)), random_unitary(2, trial_rng.spawn(1))
            phi = random_control(trial_rng.spawn(2))
            rho1, rho2 = random_density_matrix(2, trial_rng.spawn(3)), random_density_matrix(2, trial_rng.spawn(4))
            quantum = reduce_to_classical(f, g, phi, rho1, rho2)
            classical = classical_oracle(f, g, phi, rho1, rho2)
            self.assertLess(trace_distance(quantum, classical), 1e-10)

    def test_basis_controls_give_identical_full_outputs(self):
        rng = SeededGenerator(14)
        f, g = random_unitary(2, rng.spawn(0)), random_unitary(2, rng.spawn(1))
        rho1, rho2 = random_density_matrix(2, rng.spawn(2)), random_density_matrix(2, rng.spawn(3))
        for x in (0, 1):
            phi = ControlState.from_bit(x)
            joint = quantum_control_output(f, g, phi, rho1, rho2)
            control = np.outer(phi.vector, phi.vector.conj())
            expected = np.kron(control, classical_oracle(f, g, phi, rho1, rho2).matrix)
            np.testing.assert_allclose(joint.matrix, expected, atol=1e-12)

    def test_plus_control_keeps_coherence_before_trace(self):
        zero = np.diag([1, 0])
        joint = quantum_control_output(X, Z, ControlState.plus(), zero, zero)
        reduced = reduce_to_classical(X, Z, ControlState.plus(), zero, zero)
        self.assertLess(trace_distance(reduced, classical_oracle(X, Z, ControlState.plus(), zero, zero)), 1e-10)
        control = partial_trace(joint, [2, 2, 2], keep=[0])
        product = np.kron(control.matrix, reduced.matrix)
        self.assertGreater(trace_distance(joint, DensityMatrix(product)), 0.1)


class AdmissibilityTest(SimpleTestCase):
    def test_switched_channel_is_admissible(self):
        report = admissibility_check('switched_channel', trials=100, seed=0)
        self.assertTrue(report.passed)
        self.assertEqual(report.cptp_failures, 0)
        self.assertLess(report.max_cptp_deviation, 1e-9)
        self.assertLess(report.max_linearity_deviation, 1e-9)

    def test_classical_oracle_is_admissible(self):
        self.assertTrue(admissibility_check('classical_oracle', trials=10, seed=1).passed)

    def test_degenerate_mixtures_are_exactly_linear(self):
        rng = SeededGenerator(15)
        build = channel_construction('switched_channel')
        f1, f2, g = (random_cptp_channel(1, rng.spawn(k)) for k in range(3))
        for weight in (0.0, 1.0):
            self.assertLess(linearity_deviation(build, f1, f2, g, weight), 1e-12)

    def test_local_application_on_product_box(self):
        rng = SeededGenerator(16)
        box = random_non_signaling_box(1, 1, rng.spawn(0), components=1)
        result = local_application(switched_channel, box, random_cptp_channel(1, rng.spawn(1)))
        self.assertEqual(result.input_qubits, 3)
        self.assertTrue(verify_cptp(result).passed)
        self.assertGreaterEqual(np.linalg.eigvalsh(choi_matrix(result)).min(), -1e-9)

    def test_unknown_construction(self):
        with self.assertRaises(UnknownConstructionError):
            admissibility_check('frobnicate', trials=1)
        with self.assertRaises(UnknownConstructionError):
            channel_construction('frobnicate')
