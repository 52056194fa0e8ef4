from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from apps.common.exceptions import InvalidOperatorError
from apps.linalg.domain import DensityMatrix


@dataclass(frozen=True)
class GateNode:
    """Porte nommée de la bibliothèque, ou matrice en ligne si ``matrix`` est fourni."""

    name: str
    wires: tuple
    matrix: Optional[np.ndarray] = field(default=None, compare=False)

    keyword = 'gate'

    @property
    def label(self):
        return self.name


@dataclass(frozen=True)
class OracleNode:
    """Appel d'oracle, résolu par identifiant au moment de la simulation."""

    oracle_id: str
    wires: tuple

    keyword = 'oracle'

    @property
    def label(self):
        return self.oracle_id


@dataclass(frozen=True)
class PreparationNode:
    state: str
    wires: tuple

    keyword = 'prep'

    @property
    def label(self):
        return self.state


@dataclass(frozen=True)
class MeasurementNode:
    basis: str
    wires: tuple

    keyword = 'measure'

    @property
    def label(self):
        return self.basis


@dataclass(frozen=True)
class Link:
    """Routage explicite du fil ``wire`` de la sortie du nœud ``source`` vers l'entrée du nœud ``target``."""

    wire: str
    source: int
    target: int


@dataclass(frozen=True)
class OracleBudget:
    counts: dict

    def __post_init__(self):
        counts = {str(k): int(v) for k, v in dict(self.counts).items()}
        bad = {k: v for k, v in counts.items() if v < 1}
        if bad:
            raise InvalidOperatorError(f"Les budgets d'oracle doivent être positifs : {bad}")
        object.__setattr__(self, 'counts', counts)

    def allowed(self, oracle_id):
        return self.counts.get(oracle_id, 0)


@dataclass(frozen=True)
class CircuitDescription:
    """
    Circuit calculatoire : fils ordonnés, nœuds ordonnés (l'ordre fixe l'ordre
    topologique), liens explicites éventuels et budget d'oracle déclaré.
    """

    wires: tuple
    nodes: tuple = ()
    links: tuple = ()
    budget: Optional[OracleBudget] = None

    def __post_init__(self):
        object.__setattr__(self, 'wires', tuple(str(w) for w in self.wires))
        object.__setattr__(self, 'nodes', tuple(self.nodes))
        object.__setattr__(self, 'links', tuple(self.links))

    @property
    def qubit_count(self):
        return len(self.wires)

    def wire_index(self, wire):
        return self.wires.index(wire)

    def positions(self, node):
        return [self.wires.index(w) for w in node.wires]

    def oracle_calls(self):
        return Counter(node.oracle_id for node in self.nodes if isinstance(node, OracleNode))

    def prepared_wires(self):
        return [w for node in self.nodes if isinstance(node, PreparationNode) for w in node.wires]

    def input_wires(self):
        prepared = set(self.prepared_wires())
        return [w for w in self.wires if w not in prepared]

    def measurement_nodes(self):
        return [node for node in self.nodes if isinstance(node, MeasurementNode)]

    def then(self, other):
        """Concaténation sur les mêmes fils : self puis other."""
        if self.wires != other.wires:
            raise InvalidOperatorError("Concaténation de circuits sur des fils différents")
        offset = len(self.nodes)
        links = self.links + tuple(Link(l.wire, l.source + offset, l.target + offset) for l in other.links)
        return CircuitDescription(self.wires, self.nodes + other.nodes, links, self.budget)


@dataclass(frozen=True)
class MeasurementOutcome:
    label: str
    probability: float
    post_state: Optional[DensityMatrix]

    @property
    def empty(self):
        return self.post_state is None


@dataclass(frozen=True)
class Violation:
    rule: int
    message: str
    node_index: Optional[int] = None

    @property
    def kind(self):
        return f"Rule{self.rule}Violation"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def passed(self):
        return not self.violations

    def kinds(self):
        return [v.kind for v in self.violations]
