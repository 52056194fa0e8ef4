"""États de préparation et ensembles de projecteurs des nœuds de mesure."""

from functools import reduce
from itertools import product

import numpy as np

from apps.common.exceptions import DimensionMismatchError
from apps.linalg.utils import reorder_qubits

SQRT_HALF = 1 / np.sqrt(2)

SINGLE_QUBIT_STATES = {
    '0': np.array([1, 0], dtype=np.complex128),
    '1': np.array([0, 1], dtype=np.complex128),
    '+': np.array([SQRT_HALF, SQRT_HALF], dtype=np.complex128),
    '-': np.array([SQRT_HALF, -SQRT_HALF], dtype=np.complex128),
}

# Base de Bell sur (a, b) ; E := projection sur Φ⁺
BELL_STATES = {
    'PHI+': np.array([SQRT_HALF, 0, 0, SQRT_HALF], dtype=np.complex128),
    'PHI-': np.array([SQRT_HALF, 0, 0, -SQRT_HALF], dtype=np.complex128),
    'PSI+': np.array([0, SQRT_HALF, SQRT_HALF, 0], dtype=np.complex128),
    'PSI-': np.array([0, SQRT_HALF, -SQRT_HALF, 0], dtype=np.complex128),
}

SUCCESS_LABEL = 'E'

PREPARATION_STATES = ('0', '1', '+', '-', 'PHI+')
MEASUREMENT_BASES = ('BELL', 'Z', 'X')


def _kron_all(vectors):
    return reduce(np.kron, vectors)


def _pair_order(pairs):
    """Ordre naturel (a1, b1, a2, b2, …) vers l'ordre des fils (a1..ak, b1..bk)."""
    order = []
    for j in range(pairs):
        order.extend([j, pairs + j])
    return order


def preparation_arity_ok(state, arity):
    if state == 'PHI+':
        return arity >= 2 and arity % 2 == 0
    return state in SINGLE_QUBIT_STATES and arity >= 1


def measurement_arity_ok(basis, arity):
    if basis == 'BELL':
        return arity >= 2 and arity % 2 == 0
    return basis in ('Z', 'X') and arity >= 1


def preparation_vector(state, arity):
    """Vecteur préparé sur les ``arity`` fils du nœud (PHI+ : paires (w_i, w_{k+i}))."""
    if not preparation_arity_ok(state, arity):
        raise DimensionMismatchError(f"Préparation {state} impossible sur {arity} fil(s)")
    if state == 'PHI+':
        pairs = arity // 2
        return reorder_qubits(_kron_all([BELL_STATES['PHI+']] * pairs), _pair_order(pairs))
    return _kron_all([SINGLE_QUBIT_STATES[state]] * arity)


def bell_label(names):
    if all(name == 'PHI+' for name in names):
        return SUCCESS_LABEL
    return '.'.join(names)


def measurement_vectors(basis, arity):
    """
    Dictionnaire ordonné étiquette -> vecteur de base mesurée sur les fils du nœud.

    Chaque issue est un projecteur de rang 1 ; l'ensemble est complet.
    """
    if not measurement_arity_ok(basis, arity):
        raise DimensionMismatchError(f"Mesure {basis} impossible sur {arity} fil(s)")
    vectors = {}
    if basis == 'BELL':
        pairs = arity // 2
        order = _pair_order(pairs)
        for names in product(BELL_STATES, repeat=pairs):
            vector = _kron_all([BELL_STATES[name] for name in names])
            vectors[bell_label(names)] = reorder_qubits(vector, order)
    elif basis == 'Z':
        for bits in product('01', repeat=arity):
            vectors[''.join(bits)] = _kron_all([SINGLE_QUBIT_STATES[b] for b in bits])
    else:
        for signs in product('+-', repeat=arity):
            vectors[''.join(signs)] = _kron_all([SINGLE_QUBIT_STATES[s] for s in signs])
    return vectors


def measurement_projectors(basis, arity):
    return {
        label: np.outer(vector, vector.conj())
        for label, vector in measurement_vectors(basis, arity).items()
    }
