from dataclasses import dataclass, field, replace
from typing import Optional

from apps.common.conf import get_setting

REQUIRED = object()


@dataclass(frozen=True)
class Parameter:
    """Paramètre d'un scénario : ``kind`` fixe la conversion (voir parsers.coerce_parameters)."""

    name: str
    kind: str
    default: object = REQUIRED
    choices: tuple = ()
    minimum: Optional[int] = None

    @property
    def required(self):
        return self.default is REQUIRED


QUBITS = Parameter('qubits', 'int', 1, minimum=1)

SCENARIO_PARAMETERS = {
    'switch': (
        Parameter('f', 'box', 'X'),
        Parameter('g', 'box', 'Z'),
        Parameter('x', 'int', 1, choices=(0, 1)),
        Parameter('psi', 'state', '0'),
        QUBITS,
    ),
    'two_call': (
        Parameter('f', 'unitary', 'X'),
        Parameter('g', 'unitary', 'Z'),
        Parameter('phi', 'control', '+'),
        Parameter('psi', 'state', '0'),
        QUBITS,
    ),
    'teleport': (
        Parameter('f', 'unitary', 'H'),
        Parameter('g', 'unitary', 'S'),
        Parameter('phi', 'control', '+'),
        Parameter('psi', 'state', '0'),
        QUBITS,
    ),
    'separation': (
        Parameter('f', 'unitary', 'X'),
        Parameter('g', 'unitary', 'Z'),
    ),
    'noswitch_witness': (
        Parameter('box_choice', 'choice', REQUIRED, choices=('identity', 'swap_pair', 'product')),
        Parameter('f', 'unitary', 'X'),
        Parameter('g', 'unitary', 'Z'),
    ),
    'nonsignaling': (
        Parameter('box', 'bipartite', 'CNOT'),
        Parameter('qubits_a', 'int', 1, minimum=1),
        Parameter('expected', 'choice', 'signaling', choices=('signaling', 'non_signaling')),
        Parameter('product_trials', 'int', 50, minimum=0),
    ),
    'admissibility': (
        Parameter('construction', 'choice', 'switched_channel', choices=('switched_channel', 'classical_oracle')),
        Parameter('trials', 'int', 100, minimum=1),
    ),
    'reduce_check': (
        Parameter('trials', 'int', 100, minimum=1),
    ),
}


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: str
    parameters: dict
    seed: int = 0
    shots: int = 0
    tolerance: float = 1e-10
    format_version: int = 1

    def with_overrides(self, seed=None, shots=None, tolerance=None):
        """Les options de la ligne de commande priment sur le fichier."""
        changes = {}
        if seed is not None:
            changes['seed'] = int(seed)
        if shots is not None:
            changes['shots'] = int(shots)
        if tolerance is not None:
            changes['tolerance'] = float(tolerance)
        return replace(self, **changes)


@dataclass(frozen=True)
class ScenarioResult:
    spec: ScenarioSpec
    results: dict
    verdicts: dict
    version: str = field(default_factory=lambda: get_setting('VERSION'))
    generator: str = field(default_factory=lambda: get_setting('GENERATOR'))

    @property
    def passed(self):
        return all(self.verdicts.values())

    def as_report(self):
        """Champs du rapport, dans l'ordre du format."""
        return {
            'format_version': self.spec.format_version,
            'scenario': self.spec.scenario,
            'version': self.version,
            'generator': self.generator,
            'seed': self.spec.seed,
            'shots': self.spec.shots,
            'tolerance': self.spec.tolerance,
            'parameters': self.spec.parameters,
            'results': self.results,
            'verdicts': self.verdicts,
            'passed': self.passed,
        }
