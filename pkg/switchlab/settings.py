"""
Django settings for switchlab project.

Generated by 'django-admin startproject' using Django 5.2.8, then reduced to
what the simulation toolkit needs: no database, no web surface, only the
apps, the logging configuration and the ``SWITCHLAB`` tunables.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/
"""

import os
from pathlib import Path

from switchlab import __version__

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Aucune surface web : la clé ne sert qu'à satisfaire le chargement de Django.
SECRET_KEY = os.environ.get('SWITCHLAB_SECRET_KEY', 'django-insecure-switchlab-offline-toolkit')

DEBUG = os.environ.get('SWITCHLAB_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'apps.common',
    'apps.linalg',
    'apps.channels',
    'apps.circuit',
    'apps.higher_order',
    'apps.realizations',
    'apps.scenarios',
]

# Pas de persistance : les rapports sont écrits dans des fichiers.
DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Paramètres numériques du simulateur

SWITCHLAB = {
    'TOLERANCE': float(os.environ.get('SWITCHLAB_TOLERANCE', '1e-10')),
    'CPTP_TOLERANCE': float(os.environ.get('SWITCHLAB_CPTP_TOLERANCE', '1e-9')),
    'EIGEN_TOLERANCE': 1e-12,
    'FORMAT_VERSION': 1,
    'VERSION': __version__,
    'GENERATOR': 'numpy.random.PCG64',
    'DEFAULT_SEED': int(os.environ.get('SWITCHLAB_SEED', '0')),
    'SCENARIO_DIR': BASE_DIR / 'scenarios',
}


# Logging
# https://docs.djangoproject.com/en/5.2/topics/logging/

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'switchlab': {
            'format': '{asctime} {levelname} {name} : {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'switchlab',
        },
    },
    'loggers': {
        'apps': {
            'handlers': ['console'],
            'level': os.environ.get('SWITCHLAB_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
