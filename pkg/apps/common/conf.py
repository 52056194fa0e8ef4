from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    'TOLERANCE': 1e-10,
    'CPTP_TOLERANCE': 1e-9,
    'EIGEN_TOLERANCE': 1e-12,
    'FORMAT_VERSION': 1,
    'VERSION': '1.0.0',
    'GENERATOR': 'numpy.random.PCG64',
    'DEFAULT_SEED': 0,
    'SCENARIO_DIR': 'scenarios',
}


def get_setting(name):
    """
    Retourne un paramètre de ``settings.SWITCHLAB``.

    Hors d'un projet Django configuré (usage en bibliothèque), on retombe
    sur les valeurs par défaut.
    """
    if name not in DEFAULTS:
        raise KeyError(f"Paramètre SWITCHLAB inconnu : {name}")
    try:
        overrides = getattr(settings, 'SWITCHLAB', {})
    except ImproperlyConfigured:
        overrides = {}
    return overrides.get(name, DEFAULTS[name])


def tolerance(tol=None):
    return get_setting('TOLERANCE') if tol is None else float(tol)


def cptp_tolerance(tol=None):
    return get_setting('CPTP_TOLERANCE') if tol is None else float(tol)


def eigen_tolerance(tol=None):
    return get_setting('EIGEN_TOLERANCE') if tol is None else float(tol)
