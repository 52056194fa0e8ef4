"""
Simulation des circuits : vecteur d'état (nœuds unitaires), matrice densité
(nœuds canaux), post-sélection d'une issue et échantillonnage de coups.

Le registre complet suit l'ordre des fils du circuit ; les fils préparés sont
initialisés dans leur état de préparation, les autres reçoivent l'entrée.
"""

from dataclasses import dataclass
import logging

import numpy as np

from apps.channels.domain import KrausChannel, UnitaryBox
from apps.channels.library import gate_matrix
from apps.circuit.domain import GateNode, MeasurementNode, MeasurementOutcome, OracleNode, PreparationNode
from apps.circuit.measurements import measurement_vectors, preparation_vector
from apps.circuit.validation import validate_circuit
from apps.common.conf import tolerance
from apps.common.exceptions import DimensionMismatchError, SimulationError
from apps.common.rng import SeededGenerator
from apps.linalg.domain import DensityMatrix, PureState, as_density
from apps.linalg.utils import apply_on_qubits, conjugate_on_qubits, reorder_qubits, unitarity_deviation

logger = logging.getLogger(__name__)

SHOT_BLOCK = 4096


def _require_valid(circuit):
    report = validate_circuit(circuit)
    if not report.passed:
        details = '; '.join(f"{v.kind}: {v.message}" for v in report.violations)
        raise SimulationError(f"Circuit invalide : {details}")


def resolve_oracle(oracles, oracle_id):
    try:
        return (oracles or {})[oracle_id]
    except KeyError:
        raise SimulationError(f"Oracle {oracle_id!r} non fourni à la simulation")


def node_unitary(node, oracles):
    """Matrice unitaire du nœud, ou None si le nœud n'est pas unitaire."""
    arity = len(node.wires)
    if isinstance(node, GateNode):
        matrix = gate_matrix(node.name, arity) if node.matrix is None else np.asarray(node.matrix)
        return matrix if unitarity_deviation(matrix) <= tolerance() else None
    if isinstance(node, OracleNode):
        box = resolve_oracle(oracles, node.oracle_id)
        if isinstance(box, UnitaryBox):
            matrix = box.matrix
        elif len(box.kraus_ops) == 1 and unitarity_deviation(box.kraus_ops[0]) <= tolerance():
            matrix = box.kraus_ops[0]
        else:
            return None
        if matrix.shape[0] != 2 ** arity:
            raise DimensionMismatchError(
                f"L'oracle {node.oracle_id} agit sur {matrix.shape[0].bit_length() - 1} qubit(s), "
                f"le nœud a {arity} fil(s)"
            )
        return matrix
    return None


def node_kraus(node, oracles):
    """Opérateurs de Kraus d'un nœud porte/oracle, et son caractère déterministe."""
    if isinstance(node, OracleNode):
        box = resolve_oracle(oracles, node.oracle_id)
        channel = box.as_channel() if isinstance(box, UnitaryBox) else box
        if not channel.is_square or channel.input_qubits != len(node.wires):
            raise DimensionMismatchError(
                f"L'oracle {node.oracle_id} ({channel.input_qubits} qubit(s)) ne correspond pas "
                f"aux {len(node.wires)} fil(s) du nœud"
            )
        return channel.kraus_ops, channel.deterministic
    matrix = node_unitary(node, oracles)
    if matrix is None:
        raise SimulationError(f"La porte {node.label} n'est pas unitaire")
    return (matrix,), True


class _Register:
    """État du registre complet, en vecteur ou en matrice densité."""

    def __init__(self, circuit, state, pure):
        self.circuit = circuit
        self.count = circuit.qubit_count
        self.pure = pure
        self.deterministic = True
        self.data = self._initial(state)

    def _initial(self, state):
        inputs = self.circuit.input_wires()
        pieces = [state]
        natural = [self.circuit.wire_index(w) for w in inputs]
        for node in self.circuit.nodes:
            if isinstance(node, PreparationNode):
                vector = preparation_vector(node.state, len(node.wires))
                pieces.append(vector if self.pure else np.outer(vector, vector.conj()))
                natural.extend(self.circuit.positions(node))
        data = pieces[0]
        for piece in pieces[1:]:
            data = np.kron(data, piece)
        return reorder_qubits(data, natural)

    def apply(self, node, oracles):
        positions = self.circuit.positions(node)
        if self.pure:
            matrix = node_unitary(node, oracles)
            if matrix is None:
                raise SimulationError(f"Nœud non unitaire {node.keyword} {node.label} en simulation pure")
            self.data = apply_on_qubits(matrix, self.data, positions, self.count)
            return
        ops, deterministic = node_kraus(node, oracles)
        self.deterministic = self.deterministic and deterministic
        self.data = sum(conjugate_on_qubits(op, self.data, positions, self.count) for op in ops)

    def project(self, vector, positions):
        projector = np.outer(vector, vector.conj())
        if self.pure:
            self.data = apply_on_qubits(projector, self.data, positions, self.count)
        else:
            self.data = conjugate_on_qubits(projector, self.data, positions, self.count)

    def measure(self, node):
        """Mesure non sélective : Σ P ρ P."""
        if self.pure:
            raise SimulationError(f"Mesure {node.basis} en simulation pure")
        positions = self.circuit.positions(node)
        vectors = measurement_vectors(node.basis, len(node.wires)).values()
        self.data = sum(
            conjugate_on_qubits(np.outer(v, v.conj()), self.data, positions, self.count) for v in vectors
        )

    def probability(self, vector, positions):
        projector = np.outer(vector, vector.conj())
        if self.pure:
            branch = apply_on_qubits(projector, self.data, positions, self.count)
            return float(np.vdot(branch, branch).real)
        return float(np.trace(conjugate_on_qubits(projector, self.data, positions, self.count)).real)

    def weight(self):
        if self.pure:
            return float(np.vdot(self.data, self.data).real)
        return float(np.trace(self.data).real)


def _input_array(circuit, state, pure):
    inputs = circuit.input_wires()
    if state is None:
        state = PureState(np.ones(1))
    if pure:
        vector = state.amplitudes if isinstance(state, PureState) else np.asarray(state, dtype=np.complex128)
        size = vector.size
        data = vector
    else:
        density = as_density(state)
        size = density.dim
        data = density.matrix
    if size != 2 ** len(inputs):
        raise DimensionMismatchError(
            f"L'entrée est de dimension {size}, le circuit attend {len(inputs)} qubit(s) d'entrée {inputs}"
        )
    return data


def _is_pure_input(state):
    if state is None or isinstance(state, PureState):
        return True
    return not isinstance(state, DensityMatrix) and np.asarray(state).ndim == 1


def _can_run_pure(circuit, oracles):
    for node in circuit.nodes:
        if isinstance(node, (GateNode, OracleNode)) and node_unitary(node, oracles) is None:
            return False
    return True


def simulate_pure(circuit, input_state=None, oracles=None):
    """Application séquentielle des unitaires des nœuds sur le registre complet."""
    _require_valid(circuit)
    if any(isinstance(node, MeasurementNode) for node in circuit.nodes):
        raise SimulationError("simulate_pure n'accepte pas de nœud de mesure")
    register = _Register(circuit, _input_array(circuit, input_state, pure=True), pure=True)
    for index, node in enumerate(circuit.nodes):
        if isinstance(node, PreparationNode):
            continue
        logger.debug(f"Nœud {index} : {node.keyword} {node.label} sur {list(node.wires)}")
        register.apply(node, oracles)
    return PureState(register.data)


def simulate_density(circuit, input_state=None, oracles=None):
    """Composition des canaux des nœuds ; les mesures sont non sélectives."""
    _require_valid(circuit)
    state = as_density(input_state) if input_state is not None else None
    register = _Register(circuit, _input_array(circuit, state, pure=False), pure=False)
    for index, node in enumerate(circuit.nodes):
        if isinstance(node, PreparationNode):
            continue
        logger.debug(f"Nœud {index} : {node.keyword} {node.label} sur {list(node.wires)}")
        if isinstance(node, MeasurementNode):
            register.measure(node)
        else:
            register.apply(node, oracles)
    normalized = register.deterministic and (state is None or state.normalized)
    return DensityMatrix(register.data, normalized=normalized)


def _selected_measurement(circuit, label):
    carriers = [
        (index, node)
        for index, node in enumerate(circuit.nodes)
        if isinstance(node, MeasurementNode) and label in measurement_vectors(node.basis, len(node.wires))
    ]
    if not carriers:
        raise SimulationError(f"Aucune mesure du circuit ne porte l'issue {label!r}")
    if len(carriers) > 1:
        raise SimulationError(f"Plusieurs mesures portent l'issue {label!r}")
    return carriers[0]


def _run(circuit, input_state, oracles, selected_index=None, selected_vector=None, stop=None):
    """Fait évoluer le registre ; projette sur ``selected_vector`` au nœud ``selected_index``."""
    _require_valid(circuit)
    pure = _is_pure_input(input_state) and _can_run_pure(circuit, oracles) and all(
        index == selected_index or not isinstance(node, MeasurementNode)
        for index, node in enumerate(circuit.nodes)
    )
    register = _Register(circuit, _input_array(circuit, input_state, pure), pure)
    for index, node in enumerate(circuit.nodes):
        if index == stop:
            break
        if isinstance(node, PreparationNode):
            continue
        if index == selected_index:
            register.project(selected_vector, circuit.positions(node))
        elif isinstance(node, MeasurementNode):
            register.measure(node)
        else:
            register.apply(node, oracles)
    return register


def postselected_branch(circuit, input_state, label, oracles=None):
    """Branche sous-normalisée (tableau brut : vecteur ou matrice densité) de l'issue ``label``."""
    index, node = _selected_measurement(circuit, label)
    vector = measurement_vectors(node.basis, len(node.wires))[label]
    register = _run(circuit, input_state, oracles, selected_index=index, selected_vector=vector)
    return register.data


def simulate_with_postselection(circuit, input_state, outcome_label, oracles=None):
    """
    Probabilité de l'issue et état conditionnel renormalisé.

    Une issue de probabilité nulle donne un résultat vide (``post_state`` à None).
    """
    branch = postselected_branch(circuit, input_state, outcome_label, oracles)
    if branch.ndim == 1:
        probability = float(np.vdot(branch, branch).real)
        matrix = np.outer(branch, branch.conj())
    else:
        probability = float(np.trace(branch).real)
        matrix = branch
    if probability <= tolerance():
        logger.warning(f"Issue {outcome_label!r} de probabilité nulle : résultat vide")
        return MeasurementOutcome(outcome_label, max(probability, 0.0), None)
    probability = min(probability, 1.0)
    return MeasurementOutcome(outcome_label, probability, DensityMatrix(matrix / np.trace(matrix).real))


def outcome_distribution(circuit, input_state, oracles=None):
    """Distribution analytique des issues de l'unique nœud de mesure."""
    measurements = [(i, n) for i, n in enumerate(circuit.nodes) if isinstance(n, MeasurementNode)]
    if len(measurements) != 1:
        raise SimulationError(f"Le circuit doit contenir exactement une mesure, il en contient {len(measurements)}")
    index, node = measurements[0]
    register = _run(circuit, input_state, oracles, selected_index=index, stop=index)
    positions = circuit.positions(node)
    total = register.weight()
    return {
        label: register.probability(vector, positions) / total
        for label, vector in measurement_vectors(node.basis, len(node.wires)).items()
    }


@dataclass(frozen=True)
class SampleRecord:
    counts: dict
    shots: int
    seed: int
    generator: str


def sample_distribution(distribution, shots, seed, path=()):
    """Tirage multinomial par blocs ; le bloc k utilise le générateur dérivé de (seed, path, k)."""
    shots = int(shots)
    if shots <= 0:
        raise SimulationError(f"Le nombre de coups doit être positif, reçu {shots}")
    labels = list(distribution)
    probabilities = np.clip(np.array([distribution[l] for l in labels], dtype=float), 0.0, None)
    probabilities = probabilities / probabilities.sum()
    root = SeededGenerator(seed, path)
    counts = np.zeros(len(labels), dtype=np.int64)
    for block, start in enumerate(range(0, shots, SHOT_BLOCK)):
        size = min(SHOT_BLOCK, shots - start)
        counts += root.spawn(block).multinomial(size, probabilities)
    return SampleRecord(
        counts={label: int(count) for label, count in zip(labels, counts)},
        shots=shots,
        seed=root.seed,
        generator=root.name,
    )


def sample_outcomes(circuit, input_state, shots, seed, oracles=None):
    return sample_distribution(outcome_distribution(circuit, input_state, oracles), shots, seed)
