from io import StringIO
from pathlib import Path
import json
import tempfile

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.common.exceptions import diagnostic
from apps.realizations.circuits import rules_example_circuit, teleport_circuit, two_call_circuit
from apps.scenarios.parsers import inline_gates, parse_circuit, parse_scenario, serialize_circuit
from apps.scenarios.registry import run_scenario
from apps.scenarios.reports import render_report

SCENARIO_DIR = Path(settings.SWITCHLAB['SCENARIO_DIR'])

REPORT_KEYS = [
    'format_version', 'scenario', 'version', 'generator', 'seed', 'shots',
    'tolerance', 'parameters', 'results', 'verdicts', 'passed',
]


def scenario_text(scenario, **parameters):
    return json.dumps({'format_version': 1, 'scenario': scenario, 'parameters': parameters})


class CircuitParserTest(SimpleTestCase):
    def test_single_gate(self):
        circuit = parse_circuit("wires 0 1\ngate CNOT 0 1\n")
        self.assertEqual(circuit.wires, ('0', '1'))
        self.assertEqual(len(circuit.nodes), 1)
        self.assertEqual(circuit.nodes[0].name, 'CNOT')

    def test_unknown_gate_names_gate_and_line(self):
        with self.assertRaises(ValidationError) as context:
            parse_circuit("wires 0\n# commentaire\ngate FROB 0\n")
        details = diagnostic(context.exception)
        self.assertEqual(details['kind'], 'unknown_gate')
        self.assertIn('FROB', details['message'])
        self.assertEqual(details['location'], 'line 3, column 6')

    def test_two_call_round_trip(self):
        circuit = two_call_circuit(qubits=2)
        text = serialize_circuit(circuit)
        parsed = parse_circuit(text)
        self.assertEqual(parsed, circuit)
        self.assertEqual(serialize_circuit(parsed), text)

    def test_inline_gate_round_trip(self):
        circuit = rules_example_circuit()
        parsed = parse_circuit(serialize_circuit(circuit), gates=inline_gates(circuit))
        self.assertEqual(parsed, circuit)
        np.testing.assert_array_equal(parsed.nodes[2].matrix, circuit.nodes[2].matrix)

    def test_sample_files_match_builders(self):
        self.assertEqual(parse_circuit((SCENARIO_DIR / 'two_call.circuit').read_text()), two_call_circuit())
        self.assertEqual(parse_circuit((SCENARIO_DIR / 'teleport.circuit').read_text()), teleport_circuit())

    def test_links_and_comments(self):
        circuit = parse_circuit((SCENARIO_DIR / 'loop.circuit').read_text())
        self.assertEqual(len(circuit.links), 1)
        self.assertEqual(circuit.links[0].source, 2)
        self.assertEqual(circuit.budget.counts, {'f': 1, 'g': 1})


class ScenarioParserTest(SimpleTestCase):
    def test_defaults_are_applied(self):
        spec = parse_scenario('{"scenario": "teleport", "parameters": {"qubits": 1}}')
        self.assertEqual(spec.seed, 0)
        self.assertEqual(spec.shots, 0)
        self.assertEqual(spec.tolerance, 1e-10)
        self.assertEqual(spec.parameters['phi'], '+')

    def test_unknown_scenario(self):
        with self.assertRaises(ValidationError) as context:
            parse_scenario('{"scenario": "frobnicate"}')
        self.assertEqual(context.exception.code, 'unknown_scenario')

    def test_non_unitary_inline_matrix_cites_deviation(self):
        text = scenario_text('teleport', f=[[1, 1], [0, 1]])
        with self.assertRaises(ValidationError) as context:
            parse_scenario(text)
        details = diagnostic(context.exception)
        self.assertEqual(details['kind'], 'not_unitary')
        self.assertEqual(details['location'], 'parameters.f')
        self.assertIn('1.000e+00', details['message'])

    def test_overrides(self):
        spec = parse_scenario(scenario_text('separation')).with_overrides(seed=5, shots=10)
        self.assertEqual((spec.seed, spec.shots), (5, 10))


class RunScenarioTest(SimpleTestCase):
    def test_teleport(self):
        result = run_scenario(parse_scenario(scenario_text('teleport', qubits=1)))
        self.assertAlmostEqual(result.results['success_probability'], 0.25, delta=1e-12)
        self.assertTrue(result.passed)

    def test_teleport_two_qubit_haar_boxes(self):
        result = run_scenario(parse_scenario((SCENARIO_DIR / 'teleport_n2.json').read_text()))
        self.assertAlmostEqual(result.results['success_probability'], 0.0625, delta=1e-12)
        self.assertTrue(result.passed)

    def test_separation(self):
        result = run_scenario(parse_scenario(scenario_text('separation', f='X', g='Z')))
        self.assertAlmostEqual(result.results['quantum_p_minus'], 1.0, delta=1e-10)
        self.assertAlmostEqual(result.results['classical_p_minus'], 0.5, delta=1e-10)
        self.assertTrue(result.passed)

    def test_identity_witness(self):
        result = run_scenario(parse_scenario(scenario_text('noswitch_witness', box_choice='identity')))
        self.assertAlmostEqual(result.results['max_deviation'], 3.0, delta=1e-9)
        self.assertEqual(result.results['verdict'], 'normalization violated')
        self.assertTrue(result.passed)

    def test_every_sample_scenario_passes(self):
        for path in sorted(SCENARIO_DIR.glob('*.json')):
            result = run_scenario(parse_scenario(path.read_text()))
            self.assertTrue(result.passed, f"{path.name} : {result.verdicts}")

    def test_reports_are_byte_identical(self):
        spec = parse_scenario((SCENARIO_DIR / 'separation.json').read_text())
        self.assertEqual(render_report(run_scenario(spec)), render_report(run_scenario(spec)))

    def test_report_field_order(self):
        report = json.loads(render_report(run_scenario(parse_scenario(scenario_text('reduce_check', trials=5)))))
        self.assertEqual(list(report), REPORT_KEYS)
        self.assertEqual(report['generator'], 'numpy.random.PCG64')


class RunScenarioCommandTest(SimpleTestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def write(self, name, text):
        path = self.root / name
        path.write_text(text, encoding='utf-8')
        return str(path)

    def run_command(self, *args):
        out, err = StringIO(), StringIO()
        call_command('run_scenario', *args, stdout=out, stderr=err, no_color=True, verbosity=0)
        return out.getvalue()

    def test_default_scenario_with_overrides(self):
        report = json.loads(self.run_command('--seed', '4', '--shots', '2000'))
        self.assertEqual(report['scenario'], 'teleport')
        self.assertEqual(report['seed'], 4)
        self.assertEqual(sum(report['results']['counts'].values()), 2000)

    def test_output_file(self):
        out = self.root / 'report.json'
        self.run_command('--scenario', str(SCENARIO_DIR / 'nonsignaling.json'), '--out', str(out))
        report = json.loads(out.read_text())
        self.assertGreater(report['results']['a_to_b_deviation'], 0.1)
        self.assertTrue(report['passed'])

    def test_same_seed_same_bytes(self):
        path = str(SCENARIO_DIR / 'teleport.json')
        self.assertEqual(self.run_command('--scenario', path), self.run_command('--scenario', path))


MALFORMED_SCENARIOS = [
    ('{', 'syntax'),
    ('[]', 'syntax'),
    ('{"parameters": {}}', 'missing_parameter'),
    ('{"scenario": "frobnicate"}', 'unknown_scenario'),
    ('{"scenario": "teleport", "colour": 1}', 'invalid_value'),
    ('{"scenario": "teleport", "format_version": 2}', 'invalid_value'),
    ('{"scenario": "teleport", "parameters": []}', 'invalid_value'),
    ('{"scenario": "teleport", "parameters": {"h": "X"}}', 'invalid_value'),
    ('{"scenario": "noswitch_witness"}', 'missing_parameter'),
    ('{"scenario": "noswitch_witness", "parameters": {"box_choice": "loop"}}', 'invalid_value'),
    ('{"scenario": "teleport", "parameters": {"f": [[1, 1], [0, 1]]}}', 'not_unitary'),
    ('{"scenario": "teleport", "parameters": {"f": "FROB"}}', 'unknown_gate'),
    ('{"scenario": "teleport", "seed": -1}', 'invalid_value'),
    ('{"scenario": "teleport", "shots": "many"}', 'invalid_value'),
    ('{"scenario": "teleport", "tolerance": 0}', 'invalid_value'),
    ('{"scenario": "teleport", "parameters": {"qubits": 0}}', 'invalid_value'),
    ('{"scenario": "teleport", "parameters": {"f": "CNOT"}}', 'arity'),
    ('{"scenario": "teleport", "parameters": {"f": "bitflip(0.1)"}}', 'invalid_value'),
    ('{"scenario": "switch", "parameters": {"f": "bitflip(2)"}}', 'invalid_value'),
    ('{"scenario": "teleport", "parameters": {"psi": [[1, 0], [1, 0]]}}', 'invalid_value'),
    ('{"scenario": "teleport", "parameters": {"f": [[1, 0], [0]]}}', 'invalid_value'),
    ('{"scenario": "switch", "parameters": {"x": 2}}', 'invalid_value'),
    ('{"scenario": "nonsignaling", "parameters": {"box": "X"}}', 'arity'),
]

MALFORMED_CIRCUITS = [
    ("wires a\ngate FROB a\n", 'unknown_gate'),
    ("gate X a\n", 'syntax'),
    ("# vide\n", 'syntax'),
    ("wires c t\ngate CNOT c\n", 'arity'),
    ("wires a\nprep FOO a\n", 'unknown_state'),
    ("wires a\nmeasure Y a\n", 'unknown_measurement'),
    ("wires a\ngate X b\n", 'invalid_value'),
    ("wires a\nteleport a\n", 'syntax'),
    ("wires a\nbudget f 0\n", 'invalid_value'),
    ("wires a\ngate X a\nlink a x 0\n", 'invalid_value'),
    ("wires a\nwires b\n", 'syntax'),
    ("format_version 9\nwires a\n", 'invalid_value'),
    ("wires a b\nprep PHI+ a\n", 'arity'),
]


class MalformedInputTest(SimpleTestCase):
    """Chaque entrée invalide donne un diagnostic structuré, jamais une trace brute."""

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def assert_diagnostic(self, command, args, kind):
        out, err = StringIO(), StringIO()
        with self.assertRaises(CommandError):
            call_command(command, *args, stdout=out, stderr=err, no_color=True, verbosity=0)
        details = json.loads(err.getvalue())
        self.assertEqual(list(details), ['kind', 'location', 'message'])
        self.assertEqual(details['kind'], kind, details['message'])
        self.assertTrue(details['message'])
        return details

    def test_corpus_is_large_enough(self):
        self.assertGreaterEqual(len(MALFORMED_SCENARIOS) + len(MALFORMED_CIRCUITS), 20)

    def test_malformed_scenarios(self):
        for index, (text, kind) in enumerate(MALFORMED_SCENARIOS):
            with self.subTest(text=text):
                path = self.root / f"scenario_{index}.json"
                path.write_text(text, encoding='utf-8')
                self.assert_diagnostic('run_scenario', ['--scenario', str(path)], kind)

    def test_malformed_circuits(self):
        for index, (text, kind) in enumerate(MALFORMED_CIRCUITS):
            with self.subTest(text=text):
                path = self.root / f"circuit_{index}.circuit"
                path.write_text(text, encoding='utf-8')
                details = self.assert_diagnostic('check_circuit', [str(path)], kind)
                self.assertTrue(details['location'].startswith('line '))

    def test_missing_files(self):
        missing = str(self.root / 'absent.json')
        self.assert_diagnostic('run_scenario', ['--scenario', missing], 'input_file')
        self.assert_diagnostic('check_circuit', [missing], 'input_file')

    def test_malformed_budget_option(self):
        self.assert_diagnostic('check_circuit', [str(SCENARIO_DIR / 'two_call.circuit'), '--budget', 'f'], 'syntax')

    def test_bad_tolerance_override(self):
        self.assert_diagnostic('run_scenario', ['--scenario', str(SCENARIO_DIR / 'separation.json'), '--tol', '2'], 'invalid_value')


class CheckCircuitCommandTest(SimpleTestCase):
    def run_command(self, *args):
        out = StringIO()
        call_command('check_circuit', *args, stdout=out, stderr=StringIO(), no_color=True)
        return out.getvalue()

    def test_two_call_circuit_is_valid(self):
        output = self.run_command()
        self.assertIn('Circuit valide', output)
        self.assertIn('oracle f : 2 appel(s)', output)

    def test_budget_override_reports_rule4(self):
        with self.assertRaisesMessage(CommandError, 'Rule4Violation'):
            self.run_command(str(SCENARIO_DIR / 'two_call.circuit'), '--budget', 'f=1', '--budget', 'g=2')

    def test_loop_is_rule3(self):
        with self.assertRaisesMessage(CommandError, 'Rule3Violation'):
            self.run_command(str(SCENARIO_DIR / 'loop.circuit'))
