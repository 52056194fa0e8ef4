from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from apps.common.conf import tolerance
from apps.common.exceptions import DimensionMismatchError, InvalidOperatorError
from apps.linalg.domain import as_matrix, qubits_for_dimension
from apps.linalg.utils import tensor, unitarity_deviation


@dataclass(frozen=True)
class UnitaryBox:
    """Boîte noire unitaire U sur N qubits."""

    matrix: np.ndarray
    name: Optional[str] = None
    qubit_count: int = field(init=False)

    def __post_init__(self):
        matrix = as_matrix(self.matrix, self.name or 'unitaire')
        rows, cols = matrix.shape
        if rows != cols:
            raise InvalidOperatorError(f"La boîte {self.name or ''} n'est pas carrée : {rows}x{cols}")
        deviation = unitarity_deviation(matrix)
        if deviation > tolerance():
            raise InvalidOperatorError(
                f"La boîte {self.name or ''} n'est pas unitaire (écart max |U†U - I| = {deviation:.3e})"
            )
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'qubit_count', qubits_for_dimension(rows))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def as_channel(self):
        return KrausChannel((self.matrix,), name=self.name)


@dataclass(frozen=True)
class KrausChannel:
    """
    Canal ρ ↦ Σ K ρ K†.

    ``deterministic=True`` : le canal est censé être CPTP (Σ K†K = I).
    ``deterministic=False`` : élément d'instrument (Σ K†K <= I), par exemple
    la projection post-sélectionnée sur Φ⁺.
    """

    kraus_ops: tuple
    deterministic: bool = True
    name: Optional[str] = None
    input_qubits: int = field(init=False)
    output_qubits: int = field(init=False)

    def __post_init__(self):
        ops = tuple(as_matrix(op, 'opérateur de Kraus') for op in self.kraus_ops)
        if not ops:
            raise InvalidOperatorError("Un canal doit avoir au moins un opérateur de Kraus")
        shape = ops[0].shape
        if any(op.shape != shape for op in ops):
            raise DimensionMismatchError("Les opérateurs de Kraus n'ont pas tous la même forme")
        object.__setattr__(self, 'kraus_ops', ops)
        object.__setattr__(self, 'output_qubits', qubits_for_dimension(shape[0], 'dimension de sortie'))
        object.__setattr__(self, 'input_qubits', qubits_for_dimension(shape[1], 'dimension d\'entrée'))

    @classmethod
    def from_unitary(cls, unitary, name=None):
        if isinstance(unitary, UnitaryBox):
            return unitary.as_channel()
        return UnitaryBox(unitary, name=name).as_channel()

    @classmethod
    def identity(cls, qubit_count):
        return cls((np.eye(2 ** qubit_count, dtype=np.complex128),), name='I')

    @classmethod
    def mixture(cls, channels, weights):
        """Mélange convexe Σ λ_k E_k, réalisé par concaténation des familles √λ_k K."""
        weights = [float(w) for w in weights]
        if len(weights) != len(channels) or any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > tolerance():
            raise InvalidOperatorError(f"Poids de mélange invalides : {weights}")
        ops = [np.sqrt(w) * op for w, ch in zip(weights, channels) if w > 0 for op in ch.kraus_ops]
        return cls(tuple(ops), deterministic=all(ch.deterministic for ch in channels))

    @property
    def is_square(self):
        return self.input_qubits == self.output_qubits

    @property
    def input_dim(self):
        return 2 ** self.input_qubits

    @property
    def output_dim(self):
        return 2 ** self.output_qubits

    def completeness(self):
        return sum(op.conj().T @ op for op in self.kraus_ops)

    def tensor(self, other):
        ops = tuple(tensor(a, b) for a in self.kraus_ops for b in other.kraus_ops)
        return KrausChannel(ops, deterministic=self.deterministic and other.deterministic)

    def then(self, other):
        """« self puis other » : opérateurs B·A."""
        if self.output_qubits != other.input_qubits:
            raise DimensionMismatchError(
                f"Composition impossible : {self.output_qubits} qubit(s) en sortie, {other.input_qubits} en entrée"
            )
        ops = tuple(b @ a for a in self.kraus_ops for b in other.kraus_ops)
        return KrausChannel(ops, deterministic=self.deterministic and other.deterministic)


@dataclass(frozen=True)
class BipartiteBox:
    """Boîte bipartite : le canal agit sur A ⊗ B (A = facteur de gauche)."""

    channel: KrausChannel
    qubits_a: int
    qubits_b: int

    def __post_init__(self):
        if not self.channel.is_square:
            raise DimensionMismatchError("Une boîte bipartite doit conserver le nombre de qubits")
        if self.qubits_a < 1 or self.qubits_b < 1 or self.qubits_a + self.qubits_b != self.channel.input_qubits:
            raise DimensionMismatchError(
                f"Parties {self.qubits_a}+{self.qubits_b} incompatibles avec un canal sur "
                f"{self.channel.input_qubits} qubit(s)"
            )

    @classmethod
    def product(cls, channel_a, channel_b):
        return cls(channel_a.tensor(channel_b), channel_a.input_qubits, channel_b.input_qubits)


@dataclass(frozen=True)
class CptpReport:
    passed: bool
    deviation: float
    min_choi_eigenvalue: float
    deterministic: bool
    tolerance: float


@dataclass(frozen=True)
class NonSignalingReport:
    passed: bool
    a_to_b_deviation: float
    b_to_a_deviation: float
    a_to_b_passed: bool
    b_to_a_passed: bool
    tolerance: float
