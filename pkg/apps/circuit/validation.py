"""
Validation des règles du modèle de circuit :

1. les qubits sont des fils ;
2. une boîte sur plusieurs fils décrit une interaction (arité cohérente) ;
3. les relations entrée/sortie vont de gauche à droite, sans boucle ;
4. chaque boîte est un unique appel de l'oracle correspondant.

Les violations sont des entrées du rapport, jamais des exceptions.
"""

import logging

import networkx as nx
import numpy as np

from apps.channels.library import expected_arity, gate_arity_ok, is_gate
from apps.circuit.domain import (
    GateNode,
    MeasurementNode,
    PreparationNode,
    ValidationReport,
    Violation,
)
from apps.circuit.measurements import measurement_arity_ok, preparation_arity_ok

logger = logging.getLogger(__name__)


def _check_wires(circuit):
    violations = []
    if len(set(circuit.wires)) != len(circuit.wires):
        violations.append(Violation(1, f"Identifiants de fils dupliqués : {list(circuit.wires)}"))
    declared = set(circuit.wires)
    used = set()
    for index, node in enumerate(circuit.nodes):
        unknown = [w for w in node.wires if w not in declared]
        if unknown:
            violations.append(Violation(1, f"Fils non déclarés {unknown}", index))
        if len(set(node.wires)) != len(node.wires):
            violations.append(Violation(1, f"Fil répété dans le nœud {node.keyword} {node.label}", index))
        if not node.wires:
            violations.append(Violation(1, f"Nœud {node.keyword} {node.label} sans fil", index))
        if isinstance(node, PreparationNode):
            reused = [w for w in node.wires if w in used]
            if reused:
                violations.append(
                    Violation(1, f"Préparation sur des fils déjà utilisés {reused} : un fil porte un seul qubit", index)
                )
        used.update(node.wires)
    return violations


def _check_arity(circuit):
    violations = []
    for index, node in enumerate(circuit.nodes):
        arity = len(node.wires)
        if isinstance(node, GateNode):
            if node.matrix is not None:
                shape = np.shape(node.matrix)
                if shape != (2 ** arity, 2 ** arity):
                    violations.append(Violation(2, f"Porte {node.name} de forme {shape} sur {arity} fil(s)", index))
            elif not is_gate(node.name):
                violations.append(Violation(2, f"Porte inconnue {node.name}", index))
            elif not gate_arity_ok(node.name, arity):
                violations.append(
                    Violation(2, f"La porte {node.name} attend {expected_arity(node.name)} fil(s), reçu {arity}", index)
                )
        elif isinstance(node, PreparationNode) and not preparation_arity_ok(node.state, arity):
            violations.append(Violation(2, f"Préparation {node.state} invalide sur {arity} fil(s)", index))
        elif isinstance(node, MeasurementNode) and not measurement_arity_ok(node.basis, arity):
            violations.append(Violation(2, f"Mesure {node.basis} invalide sur {arity} fil(s)", index))
    return violations


def dependency_graph(circuit):
    """Graphe orienté des dépendances : ordre des nœuds sur chaque fil, plus les liens explicites."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(circuit.nodes)))
    last_on_wire = {}
    for index, node in enumerate(circuit.nodes):
        for wire in node.wires:
            if last_on_wire.get(wire, index) != index:
                graph.add_edge(last_on_wire[wire], index, wire=wire)
            last_on_wire[wire] = index
    for link in circuit.links:
        if link.source in graph and link.target in graph:
            graph.add_edge(link.source, link.target, wire=link.wire)
    return graph


def _check_links(circuit):
    violations = []
    count = len(circuit.nodes)
    for link in circuit.links:
        if not (0 <= link.source < count and 0 <= link.target < count):
            violations.append(Violation(1, f"Lien {link.wire} {link.source}->{link.target} hors du circuit"))
            continue
        for end in (link.source, link.target):
            if link.wire not in circuit.nodes[end].wires:
                violations.append(Violation(1, f"Le lien {link.wire} ne touche pas le nœud {end}", end))
    return violations


def _check_acyclic(circuit):
    graph = dependency_graph(circuit)
    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return []
    path = ' -> '.join(f"{u}" for u, _ in cycle) + f" -> {cycle[-1][1]}"
    return [Violation(3, f"Boucle dans le circuit (nœuds {path}) : un fil revient vers le passé", cycle[0][0])]


def _check_budget(circuit, budget):
    violations = []
    for oracle_id, calls in sorted(circuit.oracle_calls().items()):
        allowed = budget.allowed(oracle_id) if budget is not None else calls
        if calls > allowed:
            violations.append(
                Violation(4, f"L'oracle {oracle_id} est appelé {calls} fois pour un budget de {allowed}")
            )
    return violations


def validate_circuit(circuit, budget=None):
    """
    Rapport de validation ; ``budget`` par défaut = budget déclaré par le circuit.

    Sans budget du tout, les appels d'oracle ne sont pas limités.
    """
    budget = budget if budget is not None else circuit.budget
    violations = (
        _check_wires(circuit)
        + _check_arity(circuit)
        + _check_links(circuit)
        + _check_acyclic(circuit)
        + _check_budget(circuit, budget)
    )
    report = ValidationReport(tuple(violations))
    if report.passed:
        logger.info(f"Circuit valide : {len(circuit.nodes)} nœud(s), {circuit.qubit_count} fil(s)")
    else:
        logger.info(f"Circuit invalide : {', '.join(report.kinds())}")
    return report
