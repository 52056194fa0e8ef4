from dataclasses import dataclass, field
from typing import Optional

from apps.circuit.simulation import SampleRecord
from apps.common.exceptions import InvalidOperatorError
from apps.linalg.domain import DensityMatrix

NORMALIZATION_VIOLATED = 'normalization violated'
TRACE_PRESERVING = 'trace preserving'


@dataclass(frozen=True)
class PostselectedResult:
    """Issue E du circuit de téléportation : probabilité et état conditionnel (contrôle ⊗ cible)."""

    success_probability: float
    conditional_state: Optional[DensityMatrix]
    shots_record: Optional[SampleRecord] = None

    def __post_init__(self):
        if not -1e-12 <= self.success_probability <= 1 + 1e-12:
            raise InvalidOperatorError(f"Probabilité de succès {self.success_probability!r} hors de [0, 1]")

    @property
    def sampled_frequency(self):
        if self.shots_record is None:
            return None
        return self.shots_record.counts.get('E', 0) / self.shots_record.shots


@dataclass(frozen=True)
class WitnessReport:
    construction: str
    max_deviation: float
    probe: str
    verdict: str
    scaled: bool = True
    weights: dict = field(default_factory=dict, compare=False)

    @property
    def violated(self):
        return self.verdict == NORMALIZATION_VIOLATED


@dataclass(frozen=True)
class SeparationReport:
    quantum_distribution: dict
    classical_distribution: dict
    trace_distance: float
    quantum_counts: Optional[SampleRecord] = None
    classical_counts: Optional[SampleRecord] = None
