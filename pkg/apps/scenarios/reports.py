"""
Rendu JSON des rapports : ordre des champs fixe, réels à 17 chiffres
significatifs, pour des rapports identiques octet pour octet à seed égale.
"""

import json
import math

import numpy as np

from apps.common.exceptions import InvalidOperatorError

INDENT = '  '


def render_real(value):
    value = float(value)
    if not math.isfinite(value):
        raise InvalidOperatorError(f"Valeur non finie dans le rapport : {value!r}")
    return format(value, '.17g')


def render_value(value, depth=0):
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if value is None:
        return 'null'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return render_real(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    padding = INDENT * (depth + 1)
    closing = INDENT * depth
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = [f"{padding}{json.dumps(str(k), ensure_ascii=False)}: {render_value(v, depth + 1)}" for k, v in value.items()]
        return '{\n' + ',\n'.join(items) + '\n' + closing + '}'
    if isinstance(value, (list, tuple)):
        if not value:
            return '[]'
        return '[' + ', '.join(render_value(v, depth + 1) for v in value) + ']'
    raise InvalidOperatorError(f"Type non sérialisable dans le rapport : {type(value).__name__}")


def render_report(result):
    return render_value(result.as_report()) + '\n'


def render_diagnostic(diagnostic):
    return render_value(diagnostic) + '\n'
