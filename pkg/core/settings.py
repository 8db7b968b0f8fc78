"""Django settings for the blockeig project."""

# Standard library
import os
from pathlib import Path

# Third-party
from dotenv import load_dotenv

load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('SECRET_KEY', 'fallback-insecure-key')
DEBUG = os.environ.get('DEBUG', 'False') == 'True'
ALLOWED_HOSTS = ['localhost', '127.0.0.1', 'testserver']

INSTALLED_APPS = [
    # Third party
    'rest_framework',
    # Own apps
    'spmm_app',
    'precond_app',
    'densela_app',
    'lobpcg_app',
    'dist_app',
    'runs_app',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

ROOT_URLCONF = 'core.urls'

WSGI_APPLICATION = 'core.wsgi.application'

# No models: every computation is in-memory.
DATABASES = {}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny',
    ],
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'DEFAULT_PARSER_CLASSES': [
        'rest_framework.parsers.JSONParser',
    ],
    'UNAUTHENTICATED_USER': None,
}

BLOCKEIG = {
    'THREADS': int(os.environ.get('BLOCKEIG_THREADS', '1')),
    'BLOCK_SIZE': int(os.environ.get('BLOCKEIG_BLOCK_SIZE', '4000')),
    'CACHE_SIZE': 256,
    'VECTOR_WIDTH': 256,
    'FOM_ITERATIONS': 4,
    'TOL': 1e-6,
    'MAXITER': 500,
    'REPORT_SCHEMA_VERSION': 1,
}

LOG_LEVEL = os.environ.get('BLOCKEIG_LOG_LEVEL', 'WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'stderr': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        app: {'handlers': ['stderr'], 'level': LOG_LEVEL, 'propagate': False}
        for app in (
            'core', 'spmm_app', 'precond_app', 'densela_app',
            'lobpcg_app', 'dist_app', 'runs_app',
        )
    },
}
