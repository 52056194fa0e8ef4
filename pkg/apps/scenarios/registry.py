"""
Scénarios nommés : chaque exécutant reçoit les paramètres typés et renvoie
(résultats numériques, verdicts).
"""

import logging

import numpy as np
from tqdm import tqdm

from apps.channels.domain import BipartiteBox, UnitaryBox
from apps.channels.utils import apply_channel, is_non_signaling, random_cptp_channel
from apps.circuit.simulation import simulate_density
from apps.common.exceptions import UnknownConstructionError
from apps.common.rng import SeededGenerator
from apps.higher_order.admissibility import admissibility_check
from apps.higher_order.domain import ControlState
from apps.higher_order.utils import classical_oracle, reduce_to_classical, switch_compose
from apps.linalg.domain import DensityMatrix
from apps.linalg.utils import (
    fidelity,
    partial_trace,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    trace_distance,
)
from apps.realizations.circuits import two_call_circuit
from apps.realizations.utils import loop_contraction_witness, separation_experiment, success_probability, teleport_switch
from apps.scenarios.domain import ScenarioResult
from apps.scenarios.parsers import coerce_parameters

logger = logging.getLogger(__name__)


def _counts(record):
    return None if record is None else dict(record.counts)


def _order_superposition(f, g, phi, psi):
    """α|0⟩ ⊗ U_f U_g ψ + β|1⟩ ⊗ U_g U_f ψ"""
    fg = f.matrix @ g.matrix @ psi.amplitudes
    gf = g.matrix @ f.matrix @ psi.amplitudes
    return phi.alpha * np.kron([1, 0], fg) + phi.beta * np.kron([0, 1], gf)


def run_switch(args, spec, progress):
    f, g, x, psi, qubits = args['f'], args['g'], args['x'], args['psi'], args['qubits']
    composed = switch_compose(x, f, g)
    channel = composed.as_channel() if isinstance(composed, UnitaryBox) else composed
    direct = apply_channel(channel, psi)
    circuit = two_call_circuit(qubits=qubits)
    state = DensityMatrix(np.kron(np.diag(np.eye(2)[x]), psi.projector()))
    output = simulate_density(circuit, state, {'f': f, 'g': g})
    middle = partial_trace(output, [2, 2 ** qubits, 2 ** qubits], keep=[1])
    distance = trace_distance(direct, middle)
    results = {
        'output_populations': [float(p) for p in np.diag(direct.matrix).real],
        'two_call_trace_distance': distance,
    }
    return results, {'two_call_matches_switch': distance <= spec.tolerance}


def run_two_call(args, spec, progress):
    f, g, phi, psi, qubits = args['f'], args['g'], args['phi'], args['psi'], args['qubits']
    circuit = two_call_circuit(qubits=qubits)
    oracles = {'f': f, 'g': g}
    distances = {}
    for x in (0, 1):
        state = DensityMatrix(np.kron(np.diag(np.eye(2)[x]), psi.projector()))
        middle = partial_trace(simulate_density(circuit, state, oracles), [2, 2 ** qubits, 2 ** qubits], keep=[1])
        expected = switch_compose(x, f, g).matrix @ psi.amplitudes
        distances[x] = trace_distance(middle, expected)
    superposed = simulate_density(circuit, DensityMatrix(np.kron(np.outer(phi.vector, phi.vector.conj()), psi.projector())), oracles)
    control = partial_trace(superposed, [2, 2 ** qubits, 2 ** qubits], keep=[0])
    calls = circuit.oracle_calls()
    results = {
        'calls_f': calls['f'],
        'calls_g': calls['g'],
        'trace_distance_x0': distances[0],
        'trace_distance_x1': distances[1],
        'control_coherence': float(abs(control.matrix[0, 1])),
    }
    verdicts = {
        'two_calls_each': calls['f'] == 2 and calls['g'] == 2,
        'matches_switch': max(distances.values()) <= spec.tolerance,
    }
    return results, verdicts


def run_teleport(args, spec, progress):
    f, g, phi, psi, qubits = args['f'], args['g'], args['phi'], args['psi'], args['qubits']
    result = teleport_switch(f, g, phi, psi, shots=spec.shots, seed=spec.seed)
    expected = success_probability(qubits)
    superposition = _order_superposition(f, g, phi, psi)
    order_fidelity = fidelity(result.conditional_state, superposition) if result.conditional_state is not None else 0.0
    results = {
        'success_probability': result.success_probability,
        'expected_probability': expected,
        'order_superposition_fidelity': order_fidelity,
    }
    verdicts = {
        'probability_matches': abs(result.success_probability - expected) <= max(spec.tolerance, 1e-12),
        'superposition_of_orders': order_fidelity >= 1 - spec.tolerance,
    }
    if result.shots_record is not None:
        frequency = result.sampled_frequency
        sigma = np.sqrt(expected * (1 - expected) / spec.shots)
        results['counts'] = _counts(result.shots_record)
        results['sampled_frequency'] = frequency
        verdicts['sampled_within_3_sigma'] = bool(abs(frequency - expected) <= 3 * sigma)
    return results, verdicts


def run_separation(args, spec, progress):
    f, g = args['f'], args['g']
    report = separation_experiment(f, g, shots=spec.shots, seed=spec.seed)
    psi = np.array([1, 0], dtype=np.complex128)
    overlap = np.vdot(f.matrix @ g.matrix @ psi, g.matrix @ f.matrix @ psi).real
    interference = (1 - overlap) / 2
    results = {
        'quantum_p_minus': report.quantum_distribution['-'],
        'classical_p_minus': report.classical_distribution['-'],
        'predicted_quantum_p_minus': interference,
        'trace_distance': report.trace_distance,
    }
    if report.quantum_counts is not None:
        results['quantum_counts'] = _counts(report.quantum_counts)
        results['classical_counts'] = _counts(report.classical_counts)
    verdicts = {
        'classical_is_half': abs(report.classical_distribution['-'] - 0.5) <= spec.tolerance,
        'quantum_matches_interference': abs(report.quantum_distribution['-'] - interference) <= spec.tolerance,
    }
    return results, verdicts


def run_noswitch_witness(args, spec, progress):
    choice = args['box_choice']
    scaled = loop_contraction_witness(choice, scaled=True, f=args['f'], g=args['g'], tol=spec.tolerance)
    unscaled = loop_contraction_witness(choice, scaled=False, f=args['f'], g=args['g'], tol=spec.tolerance)
    results = {
        'max_deviation': scaled.max_deviation,
        'probe': scaled.probe,
        'verdict': scaled.verdict,
        'unscaled_max_deviation': unscaled.max_deviation,
    }
    verdicts = {
        'scaled_matches_expectation': scaled.violated == (choice != 'product'),
        'unscaled_trace_preserving': not unscaled.violated,
    }
    return results, verdicts


def run_nonsignaling(args, spec, progress):
    channel = args['box']
    qubits_a = args['qubits_a']
    report = is_non_signaling(BipartiteBox(channel, qubits_a, channel.input_qubits - qubits_a), spec.tolerance)
    root = SeededGenerator(spec.seed)
    passed = 0
    trials = args['product_trials']
    for trial in tqdm(range(trials), desc='boîtes produits', disable=not progress):
        rng = root.spawn(trial)
        box = BipartiteBox.product(random_cptp_channel(1, rng.spawn(0)), random_cptp_channel(1, rng.spawn(1)))
        passed += is_non_signaling(box, spec.tolerance).passed
    results = {
        'a_to_b_deviation': report.a_to_b_deviation,
        'b_to_a_deviation': report.b_to_a_deviation,
        'non_signaling': report.passed,
        'random_products_passed': passed,
    }
    verdicts = {
        'matches_expected': report.passed == (args['expected'] == 'non_signaling'),
        'random_products_non_signaling': passed == trials,
    }
    return results, verdicts


def run_admissibility(args, spec, progress):
    report = admissibility_check(args['construction'], args['trials'], spec.seed, progress=progress)
    results = {
        'trials': report.trials,
        'cptp_failures': report.cptp_failures,
        'max_cptp_deviation': report.max_cptp_deviation,
        'min_choi_eigenvalue': report.min_choi_eigenvalue,
        'max_linearity_deviation': report.max_linearity_deviation,
        'local_failures': report.local_failures,
        'max_local_deviation': report.max_local_deviation,
    }
    verdicts = {
        'deterministic_to_deterministic': report.cptp_failures == 0,
        'linear': report.max_linearity_deviation <= report.tolerance,
        'local_application': report.local_failures == 0,
    }
    return results, verdicts


def run_reduce_check(args, spec, progress):
    root = SeededGenerator(spec.seed)
    worst = 0.0
    for trial in tqdm(range(args['trials']), desc='réductions', disable=not progress):
        rng = root.spawn(trial)
        f, g = random_unitary(2, rng.spawn(0)), random_unitary(2, rng.spawn(1))
        phi = ControlState(*random_pure_state(2, rng.spawn(2)).amplitudes)
        rho1, rho2 = random_density_matrix(2, rng.spawn(3)), random_density_matrix(2, rng.spawn(4))
        distance = trace_distance(reduce_to_classical(f, g, phi, rho1, rho2), classical_oracle(f, g, phi, rho1, rho2))
        worst = max(worst, distance)
    return {'max_trace_distance': worst}, {'reduces_to_classical_oracle': worst <= spec.tolerance}


SCENARIOS = {
    'switch': run_switch,
    'two_call': run_two_call,
    'teleport': run_teleport,
    'separation': run_separation,
    'noswitch_witness': run_noswitch_witness,
    'nonsignaling': run_nonsignaling,
    'admissibility': run_admissibility,
    'reduce_check': run_reduce_check,
}


def run_scenario(spec, progress=False):
    """Exécute un scénario validé ; le résultat ne dépend que de (spec, seed)."""
    try:
        runner = SCENARIOS[spec.scenario]
    except KeyError:
        raise UnknownConstructionError(f"Scénario inconnu : {spec.scenario!r}")
    logger.info(f"Exécution du scénario {spec.scenario} (seed {spec.seed}, coups {spec.shots})")
    arguments = coerce_parameters(spec)
    results, verdicts = runner(arguments, spec, progress)
    result = ScenarioResult(spec, results, {name: bool(value) for name, value in verdicts.items()})
    if result.passed:
        logger.info(f"Scénario {spec.scenario} : tous les verdicts sont positifs")
    else:
        failed = [name for name, value in result.verdicts.items() if not value]
        logger.warning(f"Scénario {spec.scenario} : verdicts en échec {failed}")
    return result
