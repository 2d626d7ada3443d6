"""
Django settings for sparsecodec_project.

The project is used as a batch tool: management commands drive the
fixed-to-fixed codec in the ``xorcodec`` app. There is no web surface
and no database.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'xorcodec-batch-tool-no-http-surface')

DEBUG = os.getenv('DJANGO_DEBUG', 'False').lower() == 'true'

ALLOWED_HOSTS: list = []


# Application definition

INSTALLED_APPS = [
    'xorcodec.apps.XorcodecConfig',
]

# Batch tooling only: nothing is persisted in a database.
DATABASES: dict = {}

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Codec defaults. Environment variables (XORCODEC_*) and an optional JSON
# file override these, see xorcodec.engine.config.

XORCODEC = {
    'trellis_cap': 26,
    'correction_block': 512,
    'search_trials': 32,
    'calibration_bits': 50_000,
    'invert': True,
    'encoder': 'auto',
    'workers': 1,
    'mask_storage': 'reference',
}

XORCODEC_CONFIG_FILE = os.getenv('XORCODEC_CONFIG_FILE')


# Logging

LOG_FILE = os.getenv('XORCODEC_LOG_FILE')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'INFO',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
        'xorcodec': {
            'handlers': ['console'],
            'level': os.getenv('XORCODEC_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}

if LOG_FILE:
    LOGGING['handlers']['file'] = {
        'level': 'DEBUG',
        'class': 'logging.FileHandler',
        'filename': LOG_FILE,
        'formatter': 'verbose',
    }
    LOGGING['root']['handlers'].append('file')
    LOGGING['loggers']['xorcodec']['handlers'].append('file')
