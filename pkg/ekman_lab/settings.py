"""
Django settings for the ekman_lab project.

The project has no database, no URL routing and no web server: Django provides
the settings layer, logging configuration, the management-command CLI and the
test runner for the `ekman` app.
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('EKMAN_SECRET_KEY', 'ekman-lab-offline-key')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'ekman',
    'rest_framework',
]

# No persistence layer: outputs are CSV series, snapshots and manifests.
DATABASES = {}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Simulator defaults; every key can be overridden per run from the config file
# or the command line.

EKMAN = {
    'THREADS': int(os.environ.get('PE_THREADS', '1')),
    'KRYLOV_DIM': 20,
    'SPECTRUM_TOL': 1e-6,
    'DECAY_TRANSIENT': 0.2,
    'CFL_LIMIT': 0.8,
    'ROTATION_GUARD': 0.5,
}


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'ekman': {
            'handlers': ['console'],
            'level': os.environ.get('EKMAN_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}
