from django.core.exceptions import ValidationError


class SwitchLabError(Exception):
    """Erreur de base du simulateur, convertible en diagnostic structuré."""

    kind = 'error'

    def __init__(self, message, location=None):
        super().__init__(message)
        self.message = message
        self.location = location

    def as_dict(self):
        return {
            'kind': self.kind,
            'location': self.location,
            'message': self.message,
        }


class DimensionMismatchError(SwitchLabError, ValueError):
    kind = 'dimension_mismatch'


class InvalidOperatorError(SwitchLabError, ValueError):
    kind = 'invalid_operator'


class SimulationError(SwitchLabError):
    kind = 'simulation'


class InputFileError(SwitchLabError):
    kind = 'input_file'


class UnknownConstructionError(SwitchLabError, KeyError):
    kind = 'unknown_construction'

    def __str__(self):
        return self.message


def format_location(line=None, column=None):
    if line is None:
        return None
    if column is None:
        return f"line {line}"
    return f"line {line}, column {column}"


def diagnostic(exc):
    """
    Convertit une exception en diagnostic ``{kind, location, message}``.

    Les ValidationError de Django (parseurs, scénarios) portent leur type
    dans ``code`` et leur position dans ``params``.
    """
    if isinstance(exc, SwitchLabError):
        return exc.as_dict()
    if isinstance(exc, ValidationError):
        error = exc.error_list[0] if hasattr(exc, 'error_list') else exc
        params = error.params or {}
        message = error.message % params if params else error.message
        return {
            'kind': error.code or 'invalid',
            'location': format_location(params.get('line'), params.get('column')) or params.get('field'),
            'message': str(message),
        }
    return {
        'kind': type(exc).__name__,
        'location': None,
        'message': str(exc),
    }
