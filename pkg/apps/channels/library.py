"""Portes et canaux nommés, adressables par identifiant depuis les fichiers."""

import re

import numpy as np

from apps.channels.domain import KrausChannel, UnitaryBox
from apps.common.exceptions import DimensionMismatchError, InvalidOperatorError

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=np.complex128)
T = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128)

P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)


def controlled(unitary):
    """C-U : |0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U (contrôle sur le qubit de gauche)."""
    unitary = np.asarray(unitary, dtype=np.complex128)
    return np.kron(P0, np.eye(unitary.shape[0])) + np.kron(P1, unitary)


def swap_registers(width):
    """Échange de deux registres de ``width`` qubits (A ⊗ B -> B ⊗ A)."""
    dim = 2 ** width
    matrix = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for a in range(dim):
        for b in range(dim):
            matrix[b * dim + a, a * dim + b] = 1.0
    return matrix


CNOT = controlled(X)
CZ = controlled(Z)
SWAP = swap_registers(1)
CSWAP = controlled(SWAP)

FIXED_GATES = {
    'I': I2,
    'X': X,
    'Y': Y,
    'Z': Z,
    'H': H,
    'S': S,
    'T': T,
    'CNOT': CNOT,
    'CZ': CZ,
}

# Familles à arité variable : SWAP a1..ak b1..bk, CSWAP c a1..ak b1..bk
REGISTER_GATES = ('SWAP', 'CSWAP')


def is_gate(name):
    return name in FIXED_GATES or name in REGISTER_GATES


def gate_arity_ok(name, arity):
    if name in FIXED_GATES:
        return FIXED_GATES[name].shape[0] == 2 ** arity
    if name == 'SWAP':
        return arity >= 2 and arity % 2 == 0
    if name == 'CSWAP':
        return arity >= 3 and arity % 2 == 1
    return False


def expected_arity(name):
    if name in FIXED_GATES:
        return str(FIXED_GATES[name].shape[0].bit_length() - 1)
    if name == 'SWAP':
        return 'un nombre pair >= 2'
    if name == 'CSWAP':
        return 'un nombre impair >= 3'
    return '?'


def gate_matrix(name, arity):
    """Matrice de la porte ``name`` sur ``arity`` fils."""
    if not is_gate(name):
        raise KeyError(name)
    if not gate_arity_ok(name, arity):
        raise DimensionMismatchError(f"La porte {name} attend {expected_arity(name)} fil(s), reçu {arity}")
    if name == 'SWAP':
        return swap_registers(arity // 2)
    if name == 'CSWAP':
        return controlled(swap_registers((arity - 1) // 2))
    return FIXED_GATES[name]


def _probability(value, label):
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise InvalidOperatorError(f"Le paramètre de {label} doit être dans [0, 1], reçu {value}")
    return value


def bitflip(p):
    p = _probability(p, 'bitflip')
    return KrausChannel((np.sqrt(1 - p) * I2, np.sqrt(p) * X), name=f'bitflip({p!r})')


def phaseflip(p):
    p = _probability(p, 'phaseflip')
    return KrausChannel((np.sqrt(1 - p) * I2, np.sqrt(p) * Z), name=f'phaseflip({p!r})')


def depolarizing(p):
    """ρ ↦ (1 - p) ρ + p I/2 ; p = 1 est le canal complètement dépolarisant."""
    p = _probability(p, 'depolarizing')
    weight = np.sqrt(p / 4)
    return KrausChannel(
        (np.sqrt(1 - 3 * p / 4) * I2, weight * X, weight * Y, weight * Z),
        name=f'depolarizing({p!r})',
    )


def amplitude_damping(gamma):
    gamma = _probability(gamma, 'amplitude_damping')
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=np.complex128)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=np.complex128)
    return KrausChannel((k0, k1), name=f'amplitude_damping({gamma!r})')


NOISE_CHANNELS = {
    'bitflip': bitflip,
    'phaseflip': phaseflip,
    'depolarizing': depolarizing,
    'amplitude_damping': amplitude_damping,
}

UNITARY_BOXES = ('I', 'X', 'Y', 'Z', 'H', 'S', 'T', 'CNOT', 'CZ', 'SWAP')

_CALL = re.compile(r'^\s*([A-Za-z_]+)\s*\(\s*([^()]*?)\s*\)\s*$')


def resolve_box(identifier):
    """
    Boîte nommée : ``"X"``, ``"CNOT"``, ``"bitflip(0.3)"``…

    Les unitaires donnent une UnitaryBox, les canaux bruités une KrausChannel.
    Lève KeyError pour un identifiant inconnu.
    """
    identifier = identifier.strip()
    if identifier in UNITARY_BOXES:
        arity = 2 if identifier == 'SWAP' else None
        matrix = gate_matrix(identifier, arity) if arity else FIXED_GATES[identifier]
        return UnitaryBox(matrix, name=identifier)
    match = _CALL.match(identifier)
    if match and match.group(1) in NOISE_CHANNELS:
        try:
            parameter = float(match.group(2))
        except ValueError:
            raise InvalidOperatorError(f"Paramètre non numérique dans {identifier!r}")
        return NOISE_CHANNELS[match.group(1)](parameter)
    raise KeyError(identifier)
