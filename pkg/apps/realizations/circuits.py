"""
Circuits concrets : réalisation à deux appels, téléportation probabiliste,
boucles de contraction pour le témoin de normalisation, circuit d'exemple.

Les oracles sont référencés par identifiant ; les boîtes sont fournies au
moment de la simulation.
"""

from apps.channels.library import H, controlled
from apps.circuit.domain import (
    CircuitDescription,
    GateNode,
    MeasurementNode,
    OracleBudget,
    OracleNode,
    PreparationNode,
)
from apps.common.exceptions import InvalidOperatorError


def _register(prefix, qubits):
    if qubits < 1:
        raise InvalidOperatorError(f"Le nombre de qubits par boîte doit être >= 1, reçu {qubits}")
    return tuple(f"{prefix}{i}" for i in range(qubits))


def two_call_circuit(f_id='f', g_id='g', qubits=1):
    """
    Sandwich de SWAP contrôlés, deux appels à chaque oracle.

    Fils : c, a.. (registre du milieu, entrée et sortie), b.. (auxiliaire préparé dans |0⟩).
    Contrôle |1⟩ : a reçoit « f puis g » ; contrôle |0⟩ : « g puis f ».
    """
    a = _register('a', qubits)
    b = _register('b', qubits)
    nodes = (
        PreparationNode('0', b),
        GateNode('CSWAP', ('c',) + a + b),
        OracleNode(g_id, a),
        OracleNode(f_id, b),
        OracleNode(f_id, a),
        OracleNode(g_id, b),
        GateNode('CSWAP', ('c',) + a + b),
    )
    return CircuitDescription(('c',) + a + b, nodes, budget=OracleBudget({f_id: 2, g_id: 2}))


def teleport_circuit(f_id='f', g_id='g', qubits=1):
    """
    SWITCH probabiliste : un appel à chaque oracle et une téléportation post-sélectionnée sur E.

    Fils : c (contrôle), s.. (cible), a.. et b.. (paires Φ⁺). Le second X rétablit
    l'étiquette du contrôle : |1⟩ donne « f puis g » sur s.
    """
    s = _register('s', qubits)
    a = _register('a', qubits)
    b = _register('b', qubits)
    nodes = (
        PreparationNode('PHI+', a + b),
        GateNode('CSWAP', ('c',) + s + a),
        GateNode('X', ('c',)),
        OracleNode(g_id, s),
        OracleNode(f_id, a),
        GateNode('CSWAP', ('c',) + s + a),
        GateNode('X', ('c',)),
        MeasurementNode('BELL', a + b),
    )
    return CircuitDescription(('c',) + s + a + b, nodes, budget=OracleBudget({f_id: 1, g_id: 1}))


def swap_pair_circuit():
    """
    Téléportation du SWITCH où f et g sont deux SWAP partageant un fil e.

    Fils d'entrée c, s, e ; f agit sur (a, e), g sur (s, e).
    """
    nodes = (
        PreparationNode('PHI+', ('a', 'b')),
        GateNode('CSWAP', ('c', 's', 'a')),
        GateNode('X', ('c',)),
        OracleNode('f', ('a', 'e')),
        OracleNode('g', ('s', 'e')),
        GateNode('CSWAP', ('c', 's', 'a')),
        GateNode('X', ('c',)),
        MeasurementNode('BELL', ('a', 'b')),
    )
    return CircuitDescription(('c', 's', 'e', 'a', 'b'), nodes, budget=OracleBudget({'f': 1, 'g': 1}))


def identity_loop_circuit():
    """Boucle fermée sur elle-même : paire Φ⁺, boîte identité, projection E."""
    nodes = (
        PreparationNode('PHI+', ('a', 'b')),
        OracleNode('f', ('a',)),
        MeasurementNode('BELL', ('a', 'b')),
    )
    return CircuitDescription(('s', 'a', 'b'), nodes, budget=OracleBudget({'f': 1}))


def rules_example_circuit(unitary=None):
    """Circuit d'introduction : f sur le second fil, C-NOT, C-U, C-NOT, g."""
    unitary = H if unitary is None else unitary
    nodes = (
        OracleNode('f', ('q1',)),
        GateNode('CNOT', ('q0', 'q1')),
        GateNode('CU', ('q1', 'q2'), matrix=controlled(unitary)),
        GateNode('CNOT', ('q0', 'q1')),
        OracleNode('g', ('q2',)),
    )
    return CircuitDescription(('q0', 'q1', 'q2'), nodes, budget=OracleBudget({'f': 1, 'g': 1}))
