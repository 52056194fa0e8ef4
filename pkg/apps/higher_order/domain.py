from dataclasses import dataclass

import numpy as np

from apps.common.conf import tolerance
from apps.common.exceptions import InvalidOperatorError
from apps.linalg.domain import PureState

SQRT_HALF = 1 / np.sqrt(2)


@dataclass(frozen=True)
class ControlBit:
    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise InvalidOperatorError(f"Un bit de contrôle vaut 0 ou 1, reçu {self.value!r}")
        object.__setattr__(self, 'value', int(self.value))


@dataclass(frozen=True)
class ControlState:
    """Qubit de contrôle α|0⟩ + β|1⟩."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        alpha, beta = complex(self.alpha), complex(self.beta)
        norm = abs(alpha) ** 2 + abs(beta) ** 2
        if abs(norm - 1.0) > tolerance():
            raise InvalidOperatorError(f"|α|² + |β|² = {norm!r} au lieu de 1")
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'beta', beta)

    @classmethod
    def from_bit(cls, bit):
        value = bit.value if isinstance(bit, ControlBit) else ControlBit(bit).value
        return cls(1.0, 0.0) if value == 0 else cls(0.0, 1.0)

    @classmethod
    def plus(cls):
        return cls(SQRT_HALF, SQRT_HALF)

    @classmethod
    def minus(cls):
        return cls(SQRT_HALF, -SQRT_HALF)

    @property
    def vector(self):
        return np.array([self.alpha, self.beta], dtype=np.complex128)

    @property
    def weights(self):
        """(|⟨0|φ⟩|², |⟨1|φ⟩|²)"""
        return abs(self.alpha) ** 2, abs(self.beta) ** 2

    def as_pure_state(self):
        return PureState(self.vector)


def as_control_state(control):
    """Accepte un ControlState, un ControlBit, un entier 0/1 ou un PureState à un qubit."""
    if isinstance(control, ControlState):
        return control
    if isinstance(control, (ControlBit, int)) and not isinstance(control, bool):
        return ControlState.from_bit(control)
    if isinstance(control, PureState) and control.qubit_count == 1:
        return ControlState(*control.amplitudes)
    raise InvalidOperatorError(f"État de contrôle invalide : {control!r}")


@dataclass(frozen=True)
class AdmissibilityReport:
    construction: str
    trials: int
    cptp_failures: int
    max_cptp_deviation: float
    min_choi_eigenvalue: float
    max_linearity_deviation: float
    local_failures: int
    max_local_deviation: float
    tolerance: float

    @property
    def passed(self):
        return (
            self.cptp_failures == 0
            and self.local_failures == 0
            and self.max_linearity_deviation <= self.tolerance
        )
