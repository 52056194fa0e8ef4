import functools
import itertools

import numpy as np
from django.test import SimpleTestCase

from apps.channels.domain import UnitaryBox
from apps.channels.library import H, S, X, Z
from apps.circuit.domain import OracleBudget
from apps.circuit.measurements import SINGLE_QUBIT_STATES
from apps.circuit.simulation import simulate_pure
from apps.circuit.validation import validate_circuit
from apps.common.exceptions import DimensionMismatchError, InvalidOperatorError
from apps.common.rng import SeededGenerator
from apps.higher_order.domain import ControlState
from apps.higher_order.utils import switch_compose
from apps.linalg.domain import PureState
from apps.linalg.utils import fidelity, partial_trace, random_pure_state, random_unitary, trace_distance
from apps.realizations.circuits import rules_example_circuit, teleport_circuit, two_call_circuit
from apps.realizations.domain import NORMALIZATION_VIOLATED, TRACE_PRESERVING
from apps.realizations.utils import (
    loop_contraction_witness,
    separation_experiment,
    success_probability,
    teleport_switch,
)

ZERO = np.array([1, 0])


def random_control(rng):
    return ControlState(*random_pure_state(2, rng).amplitudes)


class TwoCallCircuitTest(SimpleTestCase):
    def test_budget_is_two_calls_each(self):
        circuit = two_call_circuit()
        self.assertEqual(circuit.budget.counts, {'f': 2, 'g': 2})
        self.assertEqual(circuit.oracle_calls(), {'f': 2, 'g': 2})
        self.assertTrue(validate_circuit(circuit).passed)
        self.assertFalse(validate_circuit(circuit, OracleBudget({'f': 1, 'g': 1})).passed)

    def test_middle_register_matches_switch(self):
        rng = SeededGenerator(100)
        circuit = two_call_circuit()
        for trial in range(100):
            trial_rng = rng.spawn(trial)
            f = UnitaryBox(random_unitary(2, trial_rng.spawn(0)))
            g = UnitaryBox(random_unitary(2, trial_rng.spawn(1)))
            psi = random_pure_state(2, trial_rng.spawn(2))
            x = trial % 2
            control = np.eye(2)[x]
            output = simulate_pure(circuit, PureState(np.kron(control, psi.amplitudes)), {'f': f, 'g': g})
            middle = partial_trace(output, [2, 2, 2], keep=[1])
            expected = PureState(switch_compose(x, f, g).matrix @ psi.amplitudes)
            self.assertLess(trace_distance(middle, expected), 1e-10)

    def test_identity_boxes_leave_register_unchanged(self):
        psi = random_pure_state(4, SeededGenerator(101))
        identity = UnitaryBox(np.eye(4))
        circuit = two_call_circuit(qubits=2)
        output = simulate_pure(circuit, PureState(np.kron([0, 1], psi.amplitudes)), {'f': identity, 'g': identity})
        middle = partial_trace(output, [2, 4, 4], keep=[1])
        self.assertAlmostEqual(fidelity(middle, psi), 1.0, delta=1e-10)

    def test_superposed_control_keeps_order_record_in_auxiliary(self):
        rng = SeededGenerator(102)
        f, g = random_unitary(2, rng.spawn(0)), random_unitary(2, rng.spawn(1))
        phi = random_control(rng.spawn(2))
        psi = random_pure_state(2, rng.spawn(3)).amplitudes
        output = simulate_pure(
            two_call_circuit(), PureState(np.kron(phi.vector, psi)), {'f': UnitaryBox(f), 'g': UnitaryBox(g)}
        )
        expected = (
            phi.beta * np.kron([0, 1], np.kron(g @ f @ psi, f @ g @ ZERO))
            + phi.alpha * np.kron([1, 0], np.kron(f @ g @ psi, g @ f @ ZERO))
        )
        np.testing.assert_allclose(output.amplitudes, expected, atol=1e-10)


class TeleportSwitchTest(SimpleTestCase):
    def test_probability_is_one_quarter_for_random_boxes(self):
        rng = SeededGenerator(200)
        for trial in range(20):
            trial_rng = rng.spawn(trial)
            result = teleport_switch(
                random_unitary(2, trial_rng.spawn(0)),
                random_unitary(2, trial_rng.spawn(1)),
                random_control(trial_rng.spawn(2)),
                random_pure_state(2, trial_rng.spawn(3)),
            )
            self.assertAlmostEqual(result.success_probability, 0.25, delta=1e-12)
            self.assertAlmostEqual(result.success_probability, success_probability(1), delta=1e-12)

    def test_sampled_frequency(self):
        result = teleport_switch(H, S, ControlState.plus(), PureState(ZERO), shots=100000, seed=0)
        self.assertEqual(result.shots_record.shots, 100000)
        self.assertAlmostEqual(result.sampled_frequency, 0.25, delta=0.005)

    def test_probability_scales_as_four_to_minus_n(self):
        rng = SeededGenerator(201)
        for qubits, expected in ((1, 0.25), (2, 0.0625), (3, 0.015625)):
            dim = 2 ** qubits
            result = teleport_switch(
                random_unitary(dim, rng.spawn(3 * qubits)),
                random_unitary(dim, rng.spawn(3 * qubits + 1)),
                ControlState.plus(),
                random_pure_state(dim, rng.spawn(3 * qubits + 2)),
            )
            self.assertAlmostEqual(result.success_probability, expected, delta=1e-12)

    def test_control_one_gives_f_then_g(self):
        rng = SeededGenerator(202)
        f, g = random_unitary(2, rng.spawn(0)), random_unitary(2, rng.spawn(1))
        psi = random_pure_state(2, rng.spawn(2))
        for x in (0, 1):
            result = teleport_switch(f, g, ControlState.from_bit(x), psi)
            expected = np.kron(np.eye(2)[x], switch_compose(x, f, g).matrix @ psi.amplitudes)
            self.assertGreaterEqual(fidelity(result.conditional_state, expected), 1 - 1e-10)

    def test_superposition_of_orders_with_x_and_z(self):
        expected = (np.kron([0, 1], Z @ X @ ZERO) + np.kron([1, 0], X @ Z @ ZERO)) / np.sqrt(2)
        result = teleport_switch(X, Z, ControlState.plus(), PureState(ZERO))
        self.assertGreaterEqual(fidelity(result.conditional_state, expected), 1 - 1e-10)

    def test_circuit_is_valid_with_one_call_each(self):
        circuit = teleport_circuit(qubits=2)
        self.assertTrue(validate_circuit(circuit).passed)
        self.assertEqual(circuit.oracle_calls(), {'f': 1, 'g': 1})

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            teleport_switch(X, Z, ControlState.plus(), PureState.basis(0, 2))

    def test_success_probability(self):
        self.assertEqual(success_probability(1), 0.25)
        self.assertEqual(success_probability(2), 0.0625)
        self.assertEqual(success_probability(3), 0.015625)
        with self.assertRaises(InvalidOperatorError):
            success_probability(0)


class LoopWitnessTest(SimpleTestCase):
    def test_identity_loop_counts_dimension(self):
        report = loop_contraction_witness('identity')
        # boucle d'une paire Φ⁺ sur un qubit : poids d² au lieu de 1
        self.assertAlmostEqual(report.max_deviation, 2 ** 2 - 1, delta=1e-9)
        self.assertEqual(report.verdict, NORMALIZATION_VIOLATED)

    def test_swap_pair_violates_normalization(self):
        report = loop_contraction_witness('swap_pair')
        self.assertGreater(report.max_deviation, 3.0 - 1e-9)
        self.assertTrue(report.violated)
        self.assertTrue(report.probe.startswith('0'))
        self.assertAlmostEqual(report.weights['111'], 1.0, delta=1e-9)

    def test_swap_pair_matches_direct_loop_contraction(self):
        def wiring(c, s, e, a):
            if c:
                s, a = a, s
            c ^= 1
            a, e = e, a  # f = SWAP(a, e)
            s, e = e, s  # g = SWAP(s, e)
            if c:
                s, a = a, s
            return c ^ 1, s, e, a

        # permutation sur (c, s, e, a), c le bit de poids fort
        unitary = np.zeros((16, 16))
        for bits in itertools.product((0, 1), repeat=4):
            out = wiring(*bits)
            unitary[int(''.join(map(str, out)), 2), int(''.join(map(str, bits)), 2)] = 1
        # sortie a reliée à l'entrée a : ⟨Φ⁺|M|Φ⁺⟩ = Tr_a(M) / 2, poids multiplié par 4
        loop = np.einsum('cseaCSEa->cseCSE', unitary.reshape((2,) * 8)).reshape(8, 8)

        report = loop_contraction_witness('swap_pair')
        expected = {}
        for labels in itertools.product(SINGLE_QUBIT_STATES, repeat=3):
            vector = functools.reduce(np.kron, [SINGLE_QUBIT_STATES[label] for label in labels])
            expected[''.join(labels)] = float(np.linalg.norm(loop @ vector) ** 2)
        self.assertEqual(set(report.weights), set(expected))
        for label, weight in expected.items():
            self.assertAlmostEqual(report.weights[label], weight, delta=1e-9, msg=label)
        worst = max(abs(weight - 1.0) for weight in expected.values())
        self.assertAlmostEqual(report.max_deviation, worst, delta=1e-9)
        self.assertAlmostEqual(worst, 3.0, delta=1e-12)

    def test_unscaled_maps_are_trace_preserving(self):
        for choice in ('identity', 'swap_pair', 'product'):
            report = loop_contraction_witness(choice, scaled=False)
            self.assertLess(report.max_deviation, 1e-10, choice)
            self.assertEqual(report.verdict, TRACE_PRESERVING)

    def test_product_boxes_close_the_loop_with_unit_weight(self):
        rng = SeededGenerator(300)
        for trial in range(5):
            f = random_unitary(2, rng.spawn(2 * trial))
            g = random_unitary(2, rng.spawn(2 * trial + 1))
            report = loop_contraction_witness('product', f=f, g=g)
            self.assertLess(report.max_deviation, 1e-9)

    def test_unknown_witness(self):
        with self.assertRaises(InvalidOperatorError):
            loop_contraction_witness('frobnicate')


class SeparationTest(SimpleTestCase):
    def test_anticommuting_boxes(self):
        report = separation_experiment(X, Z)
        self.assertAlmostEqual(report.quantum_distribution['-'], 1.0, delta=1e-10)
        self.assertAlmostEqual(report.classical_distribution['-'], 0.5, delta=1e-10)
        self.assertAlmostEqual(report.trace_distance, 1.0, delta=1e-10)

    def test_equal_boxes(self):
        u = random_unitary(2, SeededGenerator(400))
        report = separation_experiment(u, u)
        self.assertAlmostEqual(report.trace_distance, 0.0, delta=1e-10)
        self.assertAlmostEqual(report.quantum_distribution['-'], 0.0, delta=1e-10)

    def test_commuting_boxes(self):
        self.assertLess(separation_experiment(Z, S).trace_distance, 1e-10)

    def test_sampled_counts(self):
        report = separation_experiment(X, Z, shots=1000, seed=5)
        self.assertEqual(report.quantum_counts.counts, {'+': 0, '-': 1000})
        self.assertEqual(sum(report.classical_counts.counts.values()), 1000)

    def test_two_qubit_boxes_are_rejected(self):
        with self.assertRaises(DimensionMismatchError):
            separation_experiment(np.eye(4), np.eye(4))


class RulesExampleTest(SimpleTestCase):
    def test_example_circuit_is_valid(self):
        circuit = rules_example_circuit()
        self.assertTrue(validate_circuit(circuit).passed)
        self.assertEqual(validate_circuit(circuit, OracleBudget({'g': 1})).kinds(), ['Rule4Violation'])

    def test_example_circuit_semantics(self):
        output = simulate_pure(
            rules_example_circuit(),
            PureState.basis(0, 3),
            {'f': UnitaryBox(X), 'g': UnitaryBox(np.eye(2))},
        )
        expected = np.kron(np.kron(ZERO, [0, 1]), H @ ZERO)
        np.testing.assert_allclose(output.amplitudes, expected, atol=1e-12)
