"""
Lecture et écriture des formats texte : circuits (une instruction par ligne)
et fichiers de scénario (JSON).

Les erreurs sont des ValidationError de Django avec un ``code`` et une
position (ligne/colonne ou champ) dans ``params``.
"""

import json
import logging
import re

import numpy as np
from django.core.exceptions import ValidationError

from apps.channels.domain import KrausChannel, UnitaryBox
from apps.channels.library import expected_arity, gate_arity_ok, is_gate, resolve_box
from apps.circuit.domain import (
    CircuitDescription,
    GateNode,
    Link,
    MeasurementNode,
    OracleBudget,
    OracleNode,
    PreparationNode,
)
from apps.circuit.measurements import (
    MEASUREMENT_BASES,
    PREPARATION_STATES,
    SINGLE_QUBIT_STATES,
    measurement_arity_ok,
    preparation_arity_ok,
)
from apps.common.conf import get_setting, tolerance
from apps.common.exceptions import SwitchLabError
from apps.common.rng import SeededGenerator
from apps.higher_order.domain import ControlState
from apps.linalg.domain import PureState
from apps.linalg.utils import random_unitary, unitarity_deviation
from apps.scenarios.domain import SCENARIO_PARAMETERS, ScenarioSpec

logger = logging.getLogger(__name__)

TOKEN = re.compile(r'\S+')
SCENARIO_KEYS = ('format_version', 'scenario', 'parameters', 'seed', 'shots', 'tolerance')


def _error(message, code, **params):
    return ValidationError(message, code=code, params=params)


# Circuits

def _tokens(line):
    content = line.split('#', 1)[0]
    return [(match.group(), match.start() + 1) for match in TOKEN.finditer(content)]


def _integer_token(token, line, column, minimum=0):
    if not re.fullmatch(r'[0-9]+', token) or int(token) < minimum:
        raise _error(
            "Ligne %(line)s, colonne %(column)s : entier >= %(minimum)s attendu, reçu %(name)s",
            'invalid_value', line=line, column=column, name=token, minimum=minimum,
        )
    return int(token)


def _wire_tokens(args, wires, line):
    names = []
    for token, column in args:
        if token not in wires:
            raise _error(
                "Ligne %(line)s, colonne %(column)s : fil non déclaré %(name)s",
                'invalid_value', line=line, column=column, name=token,
            )
        names.append(token)
    return tuple(names)


def _require_args(keyword, args, line, column, count):
    if len(args) < count:
        raise _error(
            "Ligne %(line)s, colonne %(column)s : %(name)s attend au moins %(count)s argument(s)",
            'syntax', line=line, column=column, name=keyword, count=count,
        )


def _gate_node(args, wires, gates, line):
    name, column = args[0]
    node_wires = _wire_tokens(args[1:], wires, line)
    arity = len(node_wires)
    if name in gates:
        matrix = np.asarray(gates[name])
        if matrix.shape != (2 ** arity, 2 ** arity):
            raise _error(
                "Ligne %(line)s, colonne %(column)s : la porte %(name)s de forme %(shape)s ne s'applique pas "
                "à %(arity)s fil(s)",
                'arity', line=line, column=column, name=name, shape=matrix.shape, arity=arity,
            )
        return GateNode(name, node_wires, matrix=matrix)
    if not is_gate(name):
        raise _error(
            "Ligne %(line)s, colonne %(column)s : porte inconnue %(name)s",
            'unknown_gate', line=line, column=column, name=name,
        )
    if not gate_arity_ok(name, arity):
        raise _error(
            "Ligne %(line)s, colonne %(column)s : la porte %(name)s attend %(expected)s fil(s), reçu %(arity)s",
            'arity', line=line, column=column, name=name, expected=expected_arity(name), arity=arity,
        )
    return GateNode(name, node_wires)


def _prep_node(args, wires, line):
    state, column = args[0]
    if state not in PREPARATION_STATES:
        raise _error(
            "Ligne %(line)s, colonne %(column)s : état de préparation inconnu %(name)s",
            'unknown_state', line=line, column=column, name=state,
        )
    node_wires = _wire_tokens(args[1:], wires, line)
    if not preparation_arity_ok(state, len(node_wires)):
        raise _error(
            "Ligne %(line)s, colonne %(column)s : préparation %(name)s impossible sur %(arity)s fil(s)",
            'arity', line=line, column=column, name=state, arity=len(node_wires),
        )
    return PreparationNode(state, node_wires)


def _measure_node(args, wires, line):
    basis, column = args[0]
    if basis not in MEASUREMENT_BASES:
        raise _error(
            "Ligne %(line)s, colonne %(column)s : mesure inconnue %(name)s",
            'unknown_measurement', line=line, column=column, name=basis,
        )
    node_wires = _wire_tokens(args[1:], wires, line)
    if not measurement_arity_ok(basis, len(node_wires)):
        raise _error(
            "Ligne %(line)s, colonne %(column)s : mesure %(name)s impossible sur %(arity)s fil(s)",
            'arity', line=line, column=column, name=basis, arity=len(node_wires),
        )
    return MeasurementNode(basis, node_wires)


def parse_circuit(text, gates=None):
    """
    Lit un circuit au format texte.

    ``gates`` associe des noms de portes en ligne à leur matrice, en plus de
    la bibliothèque nommée.
    """
    gates = gates or {}
    wires = None
    budget = {}
    nodes = []
    links = []
    last_line = 1
    for line, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokens(raw)
        if not tokens:
            continue
        last_line = line
        (keyword, column), args = tokens[0], tokens[1:]

        if keyword == 'format_version':
            _require_args(keyword, args, line, column, 1)
            version = _integer_token(args[0][0], line, args[0][1])
            if version != get_setting('FORMAT_VERSION') or wires is not None or len(args) > 1:
                raise _error(
                    "Ligne %(line)s, colonne %(column)s : format_version %(name)s non pris en charge",
                    'invalid_value', line=line, column=args[0][1], name=args[0][0],
                )
            continue
        if keyword == 'wires':
            if wires is not None:
                raise _error("Ligne %(line)s, colonne %(column)s : wires déclaré deux fois", 'syntax', line=line, column=column)
            _require_args(keyword, args, line, column, 1)
            wires = tuple(token for token, _ in args)
            continue
        if wires is None:
            raise _error(
                "Ligne %(line)s, colonne %(column)s : la ligne wires doit précéder %(name)s",
                'syntax', line=line, column=column, name=keyword,
            )

        if keyword == 'budget':
            if len(args) != 2:
                raise _error("Ligne %(line)s, colonne %(column)s : budget ID COUNT attendu", 'syntax', line=line, column=column)
            oracle_id = args[0][0]
            if oracle_id in budget:
                raise _error(
                    "Ligne %(line)s, colonne %(column)s : budget de %(name)s déclaré deux fois",
                    'syntax', line=line, column=args[0][1], name=oracle_id,
                )
            budget[oracle_id] = _integer_token(args[1][0], line, args[1][1], minimum=1)
        elif keyword == 'gate':
            _require_args(keyword, args, line, column, 2)
            nodes.append(_gate_node(args, wires, gates, line))
        elif keyword == 'oracle':
            _require_args(keyword, args, line, column, 2)
            nodes.append(OracleNode(args[0][0], _wire_tokens(args[1:], wires, line)))
        elif keyword == 'prep':
            _require_args(keyword, args, line, column, 2)
            nodes.append(_prep_node(args, wires, line))
        elif keyword == 'measure':
            _require_args(keyword, args, line, column, 2)
            nodes.append(_measure_node(args, wires, line))
        elif keyword == 'link':
            if len(args) != 3:
                raise _error("Ligne %(line)s, colonne %(column)s : link WIRE SRC DST attendu", 'syntax', line=line, column=column)
            wire = _wire_tokens(args[:1], wires, line)[0]
            source = _integer_token(args[1][0], line, args[1][1])
            target = _integer_token(args[2][0], line, args[2][1])
            links.append(Link(wire, source, target))
        else:
            raise _error(
                "Ligne %(line)s, colonne %(column)s : instruction inconnue %(name)s",
                'syntax', line=line, column=column, name=keyword,
            )

    if wires is None:
        raise _error("Ligne %(line)s : aucune ligne wires", 'syntax', line=last_line)
    return CircuitDescription(wires, tuple(nodes), tuple(links), OracleBudget(budget) if budget else None)


def inline_gates(circuit):
    """Portes en ligne du circuit, à repasser à ``parse_circuit`` après sérialisation."""
    return {node.name: node.matrix for node in circuit.nodes if isinstance(node, GateNode) and node.matrix is not None}


def serialize_circuit(circuit):
    lines = [f"format_version {get_setting('FORMAT_VERSION')}", 'wires ' + ' '.join(circuit.wires)]
    if circuit.budget is not None:
        lines += [f"budget {oracle_id} {count}" for oracle_id, count in circuit.budget.counts.items()]
    for node in circuit.nodes:
        lines.append(' '.join((node.keyword, node.label) + tuple(node.wires)))
    lines += [f"link {link.wire} {link.source} {link.target}" for link in circuit.links]
    return '\n'.join(lines) + '\n'


# Valeurs des scénarios

def _number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def parse_complex(value, field):
    if _number(value):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(_number(v) for v in value):
        return complex(value[0], value[1])
    raise _error(
        "%(field)s : nombre ou paire [re, im] attendu, reçu %(name)s",
        'invalid_value', field=field, name=json.dumps(value),
    )


def parse_matrix(value, field):
    if not isinstance(value, list) or not value or not all(isinstance(row, list) for row in value):
        raise _error("%(field)s : matrice (liste de lignes) attendue", 'invalid_value', field=field)
    width = len(value[0])
    if any(len(row) != width for row in value):
        raise _error("%(field)s : lignes de longueurs différentes", 'invalid_value', field=field)
    matrix = np.array([[parse_complex(entry, field) for entry in row] for row in value], dtype=np.complex128)
    rows, cols = matrix.shape
    if rows != cols or rows & (rows - 1) or rows < 2:
        raise _error(
            "%(field)s : matrice carrée de dimension 2^n attendue, forme %(shape)s",
            'invalid_value', field=field, shape=matrix.shape,
        )
    return matrix


def parse_box(value, field, qubits=None, unitary=False, rng=None):
    """Boîte nommée (``"X"``, ``"bitflip(0.3)"``), ``"haar"`` ou matrice unitaire en ligne."""
    if value == 'haar':
        rng = rng if rng is not None else SeededGenerator()
        box = UnitaryBox(random_unitary(2 ** (qubits or 1), rng), name='haar')
    elif isinstance(value, str):
        try:
            box = resolve_box(value)
        except KeyError:
            raise _error("%(field)s : boîte inconnue %(name)s", 'unknown_gate', field=field, name=value)
        except SwitchLabError as exc:
            raise _error("%(field)s : %(detail)s", 'invalid_value', field=field, detail=exc.message)
    elif isinstance(value, list):
        matrix = parse_matrix(value, field)
        deviation = unitarity_deviation(matrix)
        if deviation > tolerance():
            raise _error(
                "%(field)s : la matrice n'est pas unitaire (écart max |U†U - I| = %(deviation).3e)",
                'not_unitary', field=field, deviation=deviation,
            )
        box = UnitaryBox(matrix, name=field)
    else:
        raise _error("%(field)s : identifiant ou matrice attendu", 'invalid_value', field=field)
    if unitary and not isinstance(box, UnitaryBox):
        raise _error("%(field)s : la boîte %(name)s doit être unitaire", 'invalid_value', field=field, name=value)
    size = box.qubit_count if isinstance(box, UnitaryBox) else box.input_qubits
    if qubits is not None and size != qubits:
        raise _error(
            "%(field)s : la boîte agit sur %(size)s qubit(s), %(qubits)s attendu(s)",
            'arity', field=field, size=size, qubits=qubits,
        )
    return box


def parse_control(value, field):
    if isinstance(value, str) and value in SINGLE_QUBIT_STATES:
        return ControlState(*SINGLE_QUBIT_STATES[value])
    if isinstance(value, list) and len(value) == 2:
        alpha, beta = (parse_complex(v, field) for v in value)
        try:
            return ControlState(alpha, beta)
        except SwitchLabError as exc:
            raise _error("%(field)s : %(detail)s", 'invalid_value', field=field, detail=exc.message)
    raise _error("%(field)s : état de contrôle 0, 1, +, - ou [α, β] attendu", 'invalid_value', field=field)


def parse_state(value, field, qubits=1):
    if isinstance(value, str) and value in SINGLE_QUBIT_STATES:
        vector = np.ones(1, dtype=np.complex128)
        for _ in range(qubits):
            vector = np.kron(vector, SINGLE_QUBIT_STATES[value])
        return PureState(vector)
    if isinstance(value, list) and len(value) == 2 ** qubits:
        try:
            return PureState([parse_complex(v, field) for v in value])
        except SwitchLabError as exc:
            raise _error("%(field)s : %(detail)s", 'invalid_value', field=field, detail=exc.message)
    raise _error(
        "%(field)s : état 0, 1, +, - ou %(size)s amplitudes attendu",
        'invalid_value', field=field, size=2 ** qubits,
    )


def _integer(value, field, minimum=None, choices=()):
    if not isinstance(value, int) or isinstance(value, bool):
        raise _error("%(field)s : entier attendu, reçu %(name)s", 'invalid_value', field=field, name=json.dumps(value))
    if minimum is not None and value < minimum:
        raise _error("%(field)s : entier >= %(minimum)s attendu", 'invalid_value', field=field, minimum=minimum)
    if choices and value not in choices:
        raise _error("%(field)s : valeur %(name)s hors de %(choices)s", 'invalid_value', field=field, name=value, choices=choices)
    return value


def coerce_parameters(spec):
    """Paramètres typés du scénario ; les boîtes ``haar`` dérivent du générateur (seed, rang)."""
    definitions = SCENARIO_PARAMETERS[spec.scenario]
    qubits = spec.parameters.get('qubits', 1)
    qubits = _integer(qubits, 'parameters.qubits', minimum=1)
    arguments = {}
    for index, definition in enumerate(definitions):
        field = f"parameters.{definition.name}"
        value = spec.parameters[definition.name]
        kind = definition.kind
        if kind in ('box', 'unitary'):
            rng = SeededGenerator(spec.seed, path=(index,))
            arguments[definition.name] = parse_box(value, field, qubits, unitary=kind == 'unitary', rng=rng)
        elif kind == 'bipartite':
            box = parse_box(value, field)
            arguments[definition.name] = box.as_channel() if isinstance(box, UnitaryBox) else box
        elif kind == 'control':
            arguments[definition.name] = parse_control(value, field)
        elif kind == 'state':
            arguments[definition.name] = parse_state(value, field, qubits)
        elif kind == 'int':
            arguments[definition.name] = _integer(value, field, definition.minimum, definition.choices)
        elif kind == 'choice':
            if value not in definition.choices:
                raise _error(
                    "%(field)s : valeur %(name)s hors de %(choices)s",
                    'invalid_value', field=field, name=json.dumps(value), choices=', '.join(definition.choices),
                )
            arguments[definition.name] = value
    if 'box' in arguments and isinstance(arguments['box'], KrausChannel):
        total = arguments['box'].input_qubits
        if not 1 <= arguments['qubits_a'] < total:
            raise _error(
                "parameters.qubits_a : partition %(qubits_a)s + ? impossible pour une boîte sur %(total)s qubit(s)",
                'arity', field='parameters.qubits_a', qubits_a=arguments['qubits_a'], total=total,
            )
    return arguments


def parse_scenario(text):
    """Lit un fichier de scénario JSON et applique les valeurs par défaut."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _error(
            "Ligne %(line)s, colonne %(column)s : JSON invalide (%(detail)s)",
            'syntax', line=exc.lineno, column=exc.colno, detail=exc.msg,
        )
    if not isinstance(data, dict):
        raise _error("Le scénario doit être un objet JSON", 'syntax', line=1, column=1)
    unknown = [key for key in data if key not in SCENARIO_KEYS]
    if unknown:
        raise _error("Champ inconnu %(name)s", 'invalid_value', field=unknown[0], name=unknown[0])

    version = _integer(data.get('format_version', get_setting('FORMAT_VERSION')), 'format_version')
    if version != get_setting('FORMAT_VERSION'):
        raise _error("format_version %(name)s non pris en charge", 'invalid_value', field='format_version', name=version)
    if 'scenario' not in data:
        raise _error("Paramètre obligatoire manquant : %(field)s", 'missing_parameter', field='scenario')
    scenario = data['scenario']
    if scenario not in SCENARIO_PARAMETERS:
        raise _error(
            "Scénario inconnu %(name)s (attendu : %(choices)s)",
            'unknown_scenario', field='scenario', name=json.dumps(scenario), choices=', '.join(SCENARIO_PARAMETERS),
        )

    raw = data.get('parameters', {})
    if not isinstance(raw, dict):
        raise _error("parameters doit être un objet", 'invalid_value', field='parameters')
    definitions = SCENARIO_PARAMETERS[scenario]
    names = [definition.name for definition in definitions]
    extra = [key for key in raw if key not in names]
    if extra:
        raise _error(
            "Paramètre %(name)s inconnu pour le scénario %(scenario)s",
            'invalid_value', field=f"parameters.{extra[0]}", name=extra[0], scenario=scenario,
        )
    parameters = {}
    for definition in definitions:
        if definition.name in raw:
            parameters[definition.name] = raw[definition.name]
        elif definition.required:
            raise _error(
                "Paramètre obligatoire manquant : %(field)s",
                'missing_parameter', field=f"parameters.{definition.name}",
            )
        else:
            parameters[definition.name] = definition.default

    tol = data.get('tolerance', get_setting('TOLERANCE'))
    if not _number(tol) or not 0 < tol < 1:
        raise _error("tolerance : réel dans ]0, 1[ attendu", 'invalid_value', field='tolerance')
    spec = ScenarioSpec(
        scenario=scenario,
        parameters=parameters,
        seed=_integer(data.get('seed', get_setting('DEFAULT_SEED')), 'seed', minimum=0),
        shots=_integer(data.get('shots', 0), 'shots', minimum=0),
        tolerance=float(tol),
        format_version=version,
    )
    coerce_parameters(spec)
    logger.info(f"Scénario {scenario} lu : {parameters}")
    return spec
