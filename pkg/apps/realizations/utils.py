import logging
from itertools import product

import numpy as np

from apps.channels.domain import KrausChannel, UnitaryBox
from apps.channels.library import P0, P1, SWAP, X, Z
from apps.circuit.domain import CircuitDescription, MeasurementNode, OracleNode, PreparationNode
from apps.circuit.measurements import SINGLE_QUBIT_STATES, SUCCESS_LABEL, measurement_vectors
from apps.circuit.simulation import (
    outcome_distribution,
    postselected_branch,
    sample_distribution,
    simulate_density,
    simulate_pure,
    simulate_with_postselection,
)
from apps.common.conf import tolerance
from apps.common.exceptions import DimensionMismatchError, InvalidOperatorError
from apps.higher_order.domain import ControlState, as_control_state
from apps.higher_order.utils import switched_unitary
from apps.linalg.domain import DensityMatrix, PureState
from apps.linalg.utils import partial_trace, trace_distance
from apps.realizations.circuits import identity_loop_circuit, swap_pair_circuit, teleport_circuit
from apps.realizations.domain import (
    NORMALIZATION_VIOLATED,
    TRACE_PRESERVING,
    PostselectedResult,
    SeparationReport,
    WitnessReport,
)

logger = logging.getLogger(__name__)


def success_probability(qubits):
    """4^-N : probabilité de l'issue E pour des boîtes unitaires sur N qubits."""
    if int(qubits) < 1:
        raise InvalidOperatorError(f"N doit être >= 1, reçu {qubits}")
    return 4.0 ** -int(qubits)


def _unitary(box, name):
    if isinstance(box, UnitaryBox):
        return box
    return UnitaryBox(box, name=name)


def teleport_switch(f, g, phi, psi, shots=0, seed=None):
    """
    SWITCH par téléportation probabiliste ; l'état conditionnel porte sur (contrôle, cible).
    """
    f, g = _unitary(f, 'f'), _unitary(g, 'g')
    if f.qubit_count != g.qubit_count:
        raise DimensionMismatchError(f"f et g sur {f.qubit_count} et {g.qubit_count} qubit(s)")
    qubits = f.qubit_count
    psi = psi if isinstance(psi, PureState) else PureState(psi)
    if psi.qubit_count != qubits:
        raise DimensionMismatchError(f"La cible a {psi.qubit_count} qubit(s), les boîtes {qubits}")
    phi = as_control_state(phi)
    circuit = teleport_circuit(qubits=qubits)
    state = PureState(np.kron(phi.vector, psi.amplitudes))
    oracles = {'f': f, 'g': g}
    outcome = simulate_with_postselection(circuit, state, SUCCESS_LABEL, oracles)
    conditional = None
    if not outcome.empty:
        dims = [2] * circuit.qubit_count
        conditional = partial_trace(outcome.post_state, dims, keep=list(range(qubits + 1)))
    record = None
    if shots:
        record = sample_distribution(outcome_distribution(circuit, state, oracles), shots, seed)
    logger.info(f"Téléportation du SWITCH sur {qubits} qubit(s) : probabilité {outcome.probability:.6g}")
    return PostselectedResult(outcome.probability, conditional, record)


def _probe_states(count):
    """Produits d'états de {0, 1, +, -} sur ``count`` fils d'entrée."""
    for labels in product(SINGLE_QUBIT_STATES, repeat=count):
        vector = np.ones(1, dtype=np.complex128)
        for label in labels:
            vector = np.kron(vector, SINGLE_QUBIT_STATES[label])
        yield ''.join(labels), PureState(vector)


def _witness_setup(box_choice, f=None, g=None):
    """Circuit, oracles et nombre de qubits de la boucle pour chaque témoin."""
    if box_choice == 'identity':
        return identity_loop_circuit(), {'f': UnitaryBox(np.eye(2), name='I')}, 1
    if box_choice == 'swap_pair':
        return swap_pair_circuit(), {'f': UnitaryBox(SWAP, name='SWAP'), 'g': UnitaryBox(SWAP, name='SWAP')}, 1
    if box_choice == 'product':
        f = _unitary(X if f is None else f, 'f')
        g = _unitary(Z if g is None else g, 'g')
        return teleport_circuit(qubits=f.qubit_count), {'f': f, 'g': g}, f.qubit_count
    raise InvalidOperatorError(f"Témoin inconnu : {box_choice!r} (attendu : identity, swap_pair, product)")


def _weight(branch):
    if branch.ndim == 1:
        return float(np.vdot(branch, branch).real)
    return float(np.trace(branch).real)


def loop_contraction_witness(box_choice, scaled=True, f=None, g=None, tol=None):
    """
    Écart maximal |tr(sortie) - 1| de la boucle contractée sur une base de sondes.

    ``scaled`` : seule la branche E est gardée, multipliée par 4^N (la boucle fermée).
    Sinon toutes les issues de Bell sont sommées avec leur probabilité.
    """
    tol = tolerance(tol)
    circuit, oracles, loop_qubits = _witness_setup(box_choice, f, g)
    measurement = next(node for node in circuit.nodes if isinstance(node, MeasurementNode))
    labels = [SUCCESS_LABEL] if scaled else list(measurement_vectors(measurement.basis, len(measurement.wires)))
    scale = 4.0 ** loop_qubits if scaled else 1.0
    weights = {}
    for probe_label, probe in _probe_states(len(circuit.input_wires())):
        total = sum(_weight(postselected_branch(circuit, probe, label, oracles)) for label in labels)
        weights[probe_label] = scale * total
    probe, worst = max(weights.items(), key=lambda item: abs(item[1] - 1.0))
    deviation = abs(worst - 1.0)
    verdict = NORMALIZATION_VIOLATED if deviation > tol else TRACE_PRESERVING
    if verdict == NORMALIZATION_VIOLATED:
        logger.warning(f"Boucle {box_choice} : normalisation violée (écart {deviation:.6g}, sonde {probe})")
    return WitnessReport(box_choice, deviation, probe, verdict, scaled, weights)


def _control_circuit(dephase):
    """Contrôle |+⟩, cible |0⟩, SWITCH cohérent puis mesure X du contrôle."""
    nodes = [PreparationNode('+', ('c',)), PreparationNode('0', ('t',))]
    if dephase:
        nodes.append(OracleNode('read', ('c',)))
    nodes += [OracleNode('switch', ('c', 't')), MeasurementNode('X', ('c',))]
    return CircuitDescription(('c', 't'), tuple(nodes))


def separation_experiment(f, g, shots=0, seed=None):
    """
    Contrôle quantique contre contrôle classique sur une même entrée |+⟩ ⊗ |0⟩.

    Le contrôle classique lit le bit (déphasage) avant le SWITCH. La distance
    compare l'état de sortie quantique à |+⟩⟨+| ⊗ cible de la version classique.
    """
    f, g = _unitary(f, 'f'), _unitary(g, 'g')
    if f.qubit_count != 1 or g.qubit_count != 1:
        raise DimensionMismatchError("L'expérience de séparation porte sur des boîtes à un qubit")
    oracles = {
        'switch': switched_unitary(f, g),
        'read': KrausChannel((P0, P1), name='lecture'),
    }
    quantum_circuit = _control_circuit(dephase=False)
    classical_circuit = _control_circuit(dephase=True)
    quantum = outcome_distribution(quantum_circuit, None, oracles)
    classical = outcome_distribution(classical_circuit, None, oracles)

    plus = ControlState.plus()
    output = simulate_pure(CircuitDescription(('c', 't'), quantum_circuit.nodes[:-1]), None, oracles)
    classical_output = simulate_density(CircuitDescription(('c', 't'), classical_circuit.nodes[:-1]), None, oracles)
    target = partial_trace(classical_output, [2, 2], keep=[1])
    counterpart = DensityMatrix(np.kron(np.outer(plus.vector, plus.vector.conj()), target.matrix))
    distance = trace_distance(output, counterpart)

    quantum_counts = classical_counts = None
    if shots:
        quantum_counts = sample_distribution(quantum, shots, seed, path=(0,))
        classical_counts = sample_distribution(classical, shots, seed, path=(1,))
    logger.info(
        f"Séparation {f.name}/{g.name} : P(-) quantique {quantum['-']:.6g}, classique {classical['-']:.6g}"
    )
    return SeparationReport(quantum, classical, distance, quantum_counts, classical_counts)
