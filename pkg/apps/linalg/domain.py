from dataclasses import dataclass, field

import numpy as np

from apps.common.conf import eigen_tolerance, tolerance
from apps.common.exceptions import DimensionMismatchError, InvalidOperatorError


def as_matrix(data, name='matrix'):
    """Convertit ``data`` en matrice complexe 2-D finie, en lecture seule."""
    matrix = np.array(data, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.size == 0:
        raise InvalidOperatorError(f"{name} doit être une matrice 2-D non vide, forme reçue {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InvalidOperatorError(f"{name} contient des valeurs non finies (NaN/Inf)")
    matrix.flags.writeable = False
    return matrix


def qubits_for_dimension(dim, name='dimension'):
    """Nombre de qubits n tel que 2**n == dim."""
    if dim < 1 or dim & (dim - 1):
        raise DimensionMismatchError(f"{name} {dim} n'est pas une puissance de 2")
    return dim.bit_length() - 1


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    qubit_count: int = field(init=False)

    def __post_init__(self):
        vector = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if not np.all(np.isfinite(vector)):
            raise InvalidOperatorError("Amplitudes non finies")
        norm = np.vdot(vector, vector).real
        if abs(norm - 1.0) > tolerance():
            raise InvalidOperatorError(f"Vecteur d'état non normalisé (norme au carré {norm!r})")
        vector.flags.writeable = False
        object.__setattr__(self, 'amplitudes', vector)
        object.__setattr__(self, 'qubit_count', qubits_for_dimension(vector.size, 'dimension du vecteur'))

    @classmethod
    def normalized(cls, amplitudes):
        vector = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        return cls(vector / np.linalg.norm(vector))

    @classmethod
    def basis(cls, index, qubit_count):
        vector = np.zeros(2 ** qubit_count, dtype=np.complex128)
        vector[index] = 1.0
        return cls(vector)

    @property
    def dim(self):
        return self.amplitudes.size

    def projector(self):
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def to_density(self):
        return DensityMatrix(self.projector())


@dataclass(frozen=True)
class DensityMatrix:
    """
    Matrice densité sur n qubits.

    ``normalized=False`` autorise une branche post-sélectionnée de trace
    dans ]0, 1]. La positivité est vérifiée à la construction, à
    ``EIGEN_TOLERANCE`` près.
    """

    matrix: np.ndarray
    normalized: bool = True
    qubit_count: int = field(init=False)

    def __post_init__(self):
        matrix = as_matrix(self.matrix, 'matrice densité')
        rows, cols = matrix.shape
        if rows != cols:
            raise DimensionMismatchError(f"Matrice densité non carrée : {rows}x{cols}")
        tol = tolerance()
        if np.max(np.abs(matrix - matrix.conj().T)) > tol:
            raise InvalidOperatorError("Matrice densité non hermitienne")
        trace = np.trace(matrix).real
        if self.normalized and abs(trace - 1.0) > tol:
            raise InvalidOperatorError(f"Trace {trace!r} différente de 1 pour un état normalisé")
        if not self.normalized and not (tol < trace <= 1.0 + tol):
            raise InvalidOperatorError(f"Trace {trace!r} hors de ]0, 1] pour une branche sous-normalisée")
        smallest = np.linalg.eigvalsh((matrix + matrix.conj().T) / 2).min()
        if smallest < -eigen_tolerance():
            raise InvalidOperatorError(f"Matrice densité non positive (valeur propre minimale {smallest:.3e})")
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'qubit_count', qubits_for_dimension(rows, 'dimension de la matrice'))

    @classmethod
    def maximally_mixed(cls, qubit_count):
        dim = 2 ** qubit_count
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def trace(self):
        return float(np.trace(self.matrix).real)

    def renormalized(self):
        return DensityMatrix(self.matrix / self.trace)

    def is_valid(self, tol=None):
        tol = eigen_tolerance(tol)
        return bool(np.linalg.eigvalsh(self.matrix).min() >= -tol)


def as_density(state):
    """Accepte un PureState, une DensityMatrix ou un tableau (vecteur ou matrice)."""
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.to_density()
    array = np.asarray(state, dtype=np.complex128)
    if array.ndim == 1:
        return PureState(array).to_density()
    return DensityMatrix(array)
