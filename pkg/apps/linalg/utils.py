"""
Algèbre linéaire complexe dense : produits tensoriels, traces partielles,
distances et prédicats d'opérateurs.

Convention : le sous-système 0 est le facteur tensoriel le plus à gauche
(bit de poids fort), c'est-à-dire le fil du haut des diagrammes.
"""

from functools import reduce
import logging

import numpy as np

from apps.common.conf import tolerance
from apps.common.exceptions import DimensionMismatchError, InvalidOperatorError
from apps.common.rng import as_generator
from apps.linalg.domain import DensityMatrix, PureState, as_density, as_matrix

logger = logging.getLogger(__name__)


def dagger(matrix):
    return np.asarray(matrix).conj().T


def tensor(*matrices):
    """Produit de Kronecker de gauche à droite."""
    if not matrices:
        raise DimensionMismatchError("tensor() attend au moins une matrice")
    return reduce(np.kron, [as_matrix(m) for m in matrices])


def max_deviation(a, b):
    """Écart maximal entrée par entrée entre deux matrices de même forme."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Formes incompatibles : {a.shape} et {b.shape}")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def is_unitary(matrix, tol=None):
    """Vrai ssi max |M†M - I| <= tol."""
    matrix = as_matrix(matrix)
    rows, cols = matrix.shape
    if rows != cols:
        raise InvalidOperatorError(f"is_unitary attend une matrice carrée, reçu {rows}x{cols}")
    return unitarity_deviation(matrix) <= tolerance(tol)


def unitarity_deviation(matrix):
    matrix = np.asarray(matrix)
    return max_deviation(dagger(matrix) @ matrix, np.eye(matrix.shape[1]))


def _check_dims(dims, size):
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != size:
        raise DimensionMismatchError(f"Le produit des dimensions {dims} ne vaut pas {size}")
    return dims


def partial_trace_matrix(matrix, dims, keep):
    """Trace partielle sur un tableau brut ; les sous-systèmes gardés restent dans l'ordre croissant."""
    matrix = np.asarray(matrix)
    dims = _check_dims(dims, matrix.shape[0])
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionMismatchError(f"Indices conservés {keep} invalides pour {len(dims)} sous-systèmes")
    count = len(dims)
    tensor_form = matrix.reshape(dims + dims)
    # Indices einsum : lignes a.., colonnes b.. ; on identifie ligne et colonne des sous-systèmes tracés.
    row_labels = list(range(count))
    col_labels = [k + count if k in keep else k for k in range(count)]
    out_labels = keep + [k + count for k in keep]
    reduced = np.einsum(tensor_form, row_labels + col_labels, out_labels)
    kept_dim = int(np.prod([dims[k] for k in keep])) if keep else 1
    return reduced.reshape(kept_dim, kept_dim)


def partial_trace(rho, dims, keep):
    """
    État réduit sur les sous-systèmes ``keep``.

    La trace est conservée, ainsi que le drapeau ``normalized`` de l'entrée.
    """
    rho = as_density(rho)
    reduced = partial_trace_matrix(rho.matrix, dims, keep)
    return DensityMatrix(reduced, normalized=rho.normalized)


def trace_distance(rho, sigma):
    """½ · somme des valeurs propres absolues de ρ - σ."""
    rho = as_density(rho)
    sigma = as_density(sigma)
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"Dimensions différentes : {rho.dim} et {sigma.dim}")
    difference = rho.matrix - sigma.matrix
    difference = (difference + dagger(difference)) / 2
    eigenvalues = np.linalg.eigvalsh(difference)
    value = float(0.5 * np.sum(np.abs(eigenvalues)))
    if value > 1.0 + tolerance():
        raise InvalidOperatorError(f"Distance de trace {value!r} supérieure à 1 : états invalides")
    # arrondi numérique seulement
    return min(value, 1.0)


def fidelity(rho, psi):
    """⟨ψ|ρ|ψ⟩ pour un état pur de référence."""
    rho = as_density(rho)
    vector = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi, dtype=np.complex128)
    if vector.size != rho.dim:
        raise DimensionMismatchError(f"Dimensions différentes : {rho.dim} et {vector.size}")
    return float(np.vdot(vector, rho.matrix @ vector).real)


def purity(rho):
    rho = as_density(rho)
    return float(np.trace(rho.matrix @ rho.matrix).real) / rho.trace ** 2


def apply_on_qubits(operator, array, targets, qubit_count):
    """
    Applique ``operator`` (2^t x 2^t) aux qubits ``targets`` de l'indice ligne de ``array``.

    ``array`` est un vecteur (2^n,) ou une matrice (2^n, k).
    """
    operator = np.asarray(operator)
    array = np.asarray(array)
    targets = [int(t) for t in targets]
    width = len(targets)
    if operator.shape != (2 ** width, 2 ** width):
        raise DimensionMismatchError(
            f"Opérateur {operator.shape} incompatible avec {width} qubit(s) cible(s)"
        )
    if array.shape[0] != 2 ** qubit_count:
        raise DimensionMismatchError(f"Registre de dimension {array.shape[0]} pour {qubit_count} qubits")
    trailing = array.shape[1:]
    tensor_form = array.reshape((2,) * qubit_count + trailing)
    moved = np.moveaxis(tensor_form, targets, list(range(width)))
    moved_shape = moved.shape
    result = operator @ moved.reshape(2 ** width, -1)
    result = np.moveaxis(result.reshape(moved_shape), list(range(width)), targets)
    return result.reshape(array.shape)


def conjugate_on_qubits(operator, matrix, targets, qubit_count):
    """A ρ A† avec A agissant sur ``targets``."""
    left = apply_on_qubits(operator, matrix, targets, qubit_count)
    return dagger(apply_on_qubits(operator, dagger(left), targets, qubit_count))


def embed_operator(operator, targets, qubit_count):
    """Matrice pleine de ``operator`` agissant sur ``targets`` (identité ailleurs)."""
    identity = np.eye(2 ** qubit_count, dtype=np.complex128)
    return apply_on_qubits(operator, identity, targets, qubit_count)


def reorder_qubits(array, order):
    """
    Réordonne les qubits d'un vecteur ou d'une matrice carrée.

    Le qubit ``i`` de l'entrée devient le qubit ``order[i]`` de la sortie.
    """
    array = np.asarray(array)
    count = len(order)
    if sorted(order) != list(range(count)) or array.shape[0] != 2 ** count:
        raise DimensionMismatchError(f"Permutation {order} invalide pour un registre de dimension {array.shape[0]}")
    inverse = np.argsort(order)
    if array.ndim == 1:
        return array.reshape((2,) * count).transpose(inverse).reshape(-1)
    axes = list(inverse) + [count + i for i in inverse]
    return array.reshape((2,) * (2 * count)).transpose(axes).reshape(array.shape)


# Tirages aléatoires (générateur PCG64 graine fixée, voir apps.common.rng)

def random_unitary(dim, rng=None):
    """Unitaire de Haar : QR d'une matrice de Ginibre complexe, phases corrigées."""
    rng = as_generator(rng)
    ginibre = (rng.normal((dim, dim)) + 1j * rng.normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(ginibre)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_pure_state(dim, rng=None):
    rng = as_generator(rng)
    vector = rng.normal(dim) + 1j * rng.normal(dim)
    return PureState.normalized(vector)


def random_density_matrix(dim, rng=None, rank=None):
    rng = as_generator(rng)
    rank = dim if rank is None else rank
    ginibre = rng.normal((dim, rank)) + 1j * rng.normal((dim, rank))
    matrix = ginibre @ dagger(ginibre)
    matrix = (matrix + dagger(matrix)) / 2
    return DensityMatrix(matrix / np.trace(matrix).real)
