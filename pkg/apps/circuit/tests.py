import numpy as np
from django.test import SimpleTestCase

from apps.channels.domain import UnitaryBox
from apps.channels.library import FIXED_GATES, H, X, bitflip, controlled, gate_matrix, REGISTER_GATES
from apps.channels.utils import apply_channel
from apps.circuit.domain import (
    CircuitDescription,
    GateNode,
    Link,
    MeasurementNode,
    OracleBudget,
    OracleNode,
    PreparationNode,
)
from apps.circuit.measurements import SUCCESS_LABEL, measurement_vectors
from apps.circuit.simulation import (
    outcome_distribution,
    sample_distribution,
    sample_outcomes,
    simulate_density,
    simulate_pure,
    simulate_with_postselection,
)
from apps.circuit.validation import validate_circuit
from apps.common.exceptions import InvalidOperatorError, SimulationError
from apps.common.rng import SeededGenerator
from apps.linalg.domain import DensityMatrix, PureState
from apps.linalg.utils import is_unitary, random_density_matrix, random_pure_state, random_unitary, trace_distance

PLUS = np.array([1, 1]) / np.sqrt(2)
BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


def bell_circuit():
    return CircuitDescription(('a', 'b'), (MeasurementNode('BELL', ('a', 'b')),))


class ValidationTest(SimpleTestCase):
    def test_straight_line_circuit_passes(self):
        circuit = CircuitDescription(
            ('c', 't'),
            (GateNode('H', ('c',)), GateNode('CNOT', ('c', 't')), OracleNode('f', ('t',))),
        )
        self.assertTrue(validate_circuit(circuit, OracleBudget({'f': 1})).passed)

    def test_wire_fed_back_is_rule3(self):
        circuit = CircuitDescription(
            ('a', 'b'),
            (GateNode('X', ('a',)), GateNode('CNOT', ('a', 'b')), GateNode('Z', ('b',))),
            links=(Link('a', 1, 0),),
        )
        report = validate_circuit(circuit)
        self.assertEqual(report.kinds(), ['Rule3Violation'])

    def test_oracle_over_budget_is_rule4(self):
        circuit = CircuitDescription(('a',), (OracleNode('f', ('a',)), OracleNode('f', ('a',))))
        report = validate_circuit(circuit, OracleBudget({'f': 1}))
        self.assertEqual(report.kinds(), ['Rule4Violation'])

    def test_declared_budget_is_used_by_default(self):
        circuit = CircuitDescription(
            ('a',), (OracleNode('f', ('a',)), OracleNode('f', ('a',))), budget=OracleBudget({'f': 1})
        )
        self.assertFalse(validate_circuit(circuit).passed)
        self.assertTrue(validate_circuit(circuit, OracleBudget({'f': 2})).passed)

    def test_arity_mismatch_is_rule2(self):
        circuit = CircuitDescription(('a', 'b', 'c'), (GateNode('CNOT', ('a', 'b', 'c')),))
        self.assertEqual(validate_circuit(circuit).kinds(), ['Rule2Violation'])

    def test_undeclared_and_repeated_wires_are_rule1(self):
        circuit = CircuitDescription(('a', 'b'), (GateNode('CNOT', ('a', 'a')), GateNode('X', ('z',))))
        kinds = validate_circuit(circuit).kinds()
        self.assertIn('Rule1Violation', kinds)
        self.assertEqual(kinds.count('Rule1Violation'), 2)

    def test_budget_must_be_positive(self):
        with self.assertRaises(InvalidOperatorError):
            OracleBudget({'f': 0})


class SimulatePureTest(SimpleTestCase):
    def test_cnot_entangles(self):
        circuit = CircuitDescription(('c', 't'), (GateNode('CNOT', ('c', 't')),))
        output = simulate_pure(circuit, PureState(np.kron(PLUS, [1, 0])))
        np.testing.assert_allclose(output.amplitudes, BELL, atol=1e-12)

    def test_controlled_u_with_control_zero_is_identity(self):
        u = random_unitary(2, SeededGenerator(1))
        circuit = CircuitDescription(('c', 't'), (GateNode('CU', ('c', 't'), matrix=controlled(u)),))
        psi = random_pure_state(2, SeededGenerator(2))
        output = simulate_pure(circuit, PureState(np.kron([1, 0], psi.amplitudes)))
        np.testing.assert_allclose(output.amplitudes, np.kron([1, 0], psi.amplitudes), atol=1e-12)

    def test_controlled_swap_exchanges_registers(self):
        rng = SeededGenerator(3)
        psi, phi = random_pure_state(2, rng.spawn(0)), random_pure_state(2, rng.spawn(1))
        circuit = CircuitDescription(('c', 'a', 'b'), (GateNode('CSWAP', ('c', 'a', 'b')),))
        output = simulate_pure(circuit, PureState(np.kron([0, 1], np.kron(psi.amplitudes, phi.amplitudes))))
        np.testing.assert_allclose(output.amplitudes, np.kron([0, 1], np.kron(phi.amplitudes, psi.amplitudes)), atol=1e-12)

    def test_oracles_are_resolved_at_simulation_time(self):
        circuit = CircuitDescription(('a',), (OracleNode('f', ('a',)),))
        zero = PureState.basis(0, 1)
        flipped = simulate_pure(circuit, zero, {'f': UnitaryBox(X)})
        unchanged = simulate_pure(circuit, zero, {'f': UnitaryBox(np.eye(2))})
        np.testing.assert_allclose(flipped.amplitudes, [0, 1])
        np.testing.assert_allclose(unchanged.amplitudes, [1, 0])

    def test_missing_oracle(self):
        circuit = CircuitDescription(('a',), (OracleNode('f', ('a',)),))
        with self.assertRaises(SimulationError):
            simulate_pure(circuit, PureState.basis(0, 1))

    def test_noisy_oracle_is_rejected(self):
        circuit = CircuitDescription(('a',), (OracleNode('f', ('a',)),))
        with self.assertRaises(SimulationError):
            simulate_pure(circuit, PureState.basis(0, 1), {'f': bitflip(0.2)})

    def test_prepared_wires_are_not_inputs(self):
        circuit = CircuitDescription(
            ('a', 'b'), (PreparationNode('1', ('b',)), GateNode('CNOT', ('b', 'a')))
        )
        output = simulate_pure(circuit, PureState.basis(0, 1))
        np.testing.assert_allclose(output.amplitudes, [0, 0, 0, 1])

    def test_concatenation_is_composition(self):
        rng = SeededGenerator(17)
        wires = ('a', 'b', 'c')
        for trial in range(10):
            trial_rng = rng.spawn(trial)
            first = CircuitDescription(wires, (
                GateNode('U', ('a', 'c'), matrix=random_unitary(4, trial_rng.spawn(0))),
                GateNode('CNOT', ('c', 'b')),
            ))
            second = CircuitDescription(wires, (
                GateNode('H', ('b',)),
                GateNode('V', ('b', 'a'), matrix=random_unitary(4, trial_rng.spawn(1))),
            ))
            psi = random_pure_state(8, trial_rng.spawn(2))
            joined = simulate_pure(first.then(second), psi)
            stepwise = simulate_pure(second, simulate_pure(first, psi))
            np.testing.assert_allclose(joined.amplitudes, stepwise.amplitudes, atol=1e-12)

    def test_library_gates_are_unitary(self):
        for name, matrix in FIXED_GATES.items():
            self.assertTrue(is_unitary(matrix, 1e-12), name)
        for name in REGISTER_GATES:
            self.assertTrue(is_unitary(gate_matrix(name, 5 if name == 'CSWAP' else 4), 1e-12), name)


class SimulateDensityTest(SimpleTestCase):
    def test_unitary_circuit_matches_pure_simulation(self):
        circuit = CircuitDescription(('a', 'b'), (GateNode('H', ('a',)), GateNode('CNOT', ('a', 'b'))))
        psi = random_pure_state(4, SeededGenerator(5))
        pure = simulate_pure(circuit, psi)
        mixed = simulate_density(circuit, psi.to_density())
        self.assertLess(trace_distance(mixed, pure.to_density()), 1e-12)

    def test_empty_circuit_is_identity(self):
        rho = random_density_matrix(4, SeededGenerator(6))
        output = simulate_density(CircuitDescription(('a', 'b')), rho)
        np.testing.assert_allclose(output.matrix, rho.matrix, atol=1e-12)

    def test_bitflip_node_matches_apply_channel(self):
        rho = random_density_matrix(2, SeededGenerator(7))
        circuit = CircuitDescription(('a',), (OracleNode('noise', ('a',)),))
        output = simulate_density(circuit, rho, {'noise': bitflip(0.3)})
        np.testing.assert_allclose(output.matrix, apply_channel(bitflip(0.3), rho).matrix, atol=1e-12)

    def test_trace_is_preserved_with_measurements(self):
        circuit = CircuitDescription(
            ('a', 'b', 'c'),
            (
                PreparationNode('PHI+', ('b', 'c')),
                OracleNode('noise', ('a',)),
                MeasurementNode('BELL', ('a', 'b')),
                GateNode('H', ('c',)),
            ),
        )
        output = simulate_density(circuit, random_density_matrix(2, SeededGenerator(8)), {'noise': bitflip(0.2)})
        self.assertAlmostEqual(output.trace, 1.0, delta=1e-9)
        self.assertTrue(output.normalized)


class PostselectionTest(SimpleTestCase):
    def test_bell_state_gives_e_with_certainty(self):
        outcome = simulate_with_postselection(bell_circuit(), PureState(BELL), SUCCESS_LABEL)
        self.assertAlmostEqual(outcome.probability, 1.0, delta=1e-12)

    def test_product_state_gives_e_with_one_quarter(self):
        outcome = simulate_with_postselection(bell_circuit(), PureState.basis(0, 2), SUCCESS_LABEL)
        self.assertAlmostEqual(outcome.probability, 0.25, delta=1e-12)
        self.assertAlmostEqual(outcome.post_state.trace, 1.0, delta=1e-12)

    def test_zero_probability_is_flagged(self):
        outcome = simulate_with_postselection(bell_circuit(), PureState.basis(0, 2), 'PSI+')
        self.assertTrue(outcome.empty)
        self.assertEqual(outcome.probability, 0.0)

    def test_unknown_label(self):
        with self.assertRaises(SimulationError):
            simulate_with_postselection(bell_circuit(), PureState.basis(0, 2), 'FROB')

    def test_complete_outcome_set_sums_to_one(self):
        rho = random_density_matrix(4, SeededGenerator(12))
        total = sum(
            simulate_with_postselection(bell_circuit(), rho, label).probability
            for label in measurement_vectors('BELL', 2)
        )
        self.assertAlmostEqual(total, 1.0, delta=1e-10)

    def test_x_measurement_distribution(self):
        circuit = CircuitDescription(('a',), (GateNode('H', ('a',)), MeasurementNode('X', ('a',))))
        distribution = outcome_distribution(circuit, PureState.basis(1, 1))
        self.assertAlmostEqual(distribution['-'], 1.0, delta=1e-12)
        self.assertAlmostEqual(distribution['+'], 0.0, delta=1e-12)


class SamplingTest(SimpleTestCase):
    def test_certain_outcome_takes_all_shots(self):
        record = sample_distribution({'E': 1.0}, 1000, seed=3)
        self.assertEqual(record.counts['E'], 1000)

    def test_bell_frequency_of_product_state(self):
        record = sample_outcomes(bell_circuit(), PureState.basis(0, 2), 100000, seed=0)
        self.assertEqual(sum(record.counts.values()), 100000)
        self.assertAlmostEqual(record.counts[SUCCESS_LABEL] / 100000, 0.25, delta=0.005)

    def test_same_seed_gives_same_counts(self):
        state = PureState(np.kron(H @ [1, 0], [1, 0]))
        first = sample_outcomes(bell_circuit(), state, 5000, seed=99)
        second = sample_outcomes(bell_circuit(), state, 5000, seed=99)
        self.assertEqual(first.counts, second.counts)
        self.assertEqual(first.generator, 'numpy.random.PCG64')

    def test_non_positive_shots(self):
        with self.assertRaises(SimulationError):
            sample_distribution({'E': 1.0}, 0, seed=0)
