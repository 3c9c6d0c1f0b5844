"""
Django settings for the quasilab project.

The project hosts a single app, `quasilat`, whose numerical library is driven
through management commands (`python manage.py <command>`). There is no web
surface; the database only keeps the history of recorded scenario runs.

For the full list of Django settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os

# Build paths inside the project like this: os.path.join(BASE_DIR, ...)
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Only used for signing, which nothing in this project does.
SECRET_KEY = os.environ.get('QUASILAB_SECRET_KEY', 'quasilab-local-only')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'rest_framework',
    'quasilat',
]


# Database
# https://docs.djangoproject.com/en/4.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.path.join(BASE_DIR, 'db.sqlite3'),
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.AutoField'


# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


REST_FRAMEWORK = {
    # reports must be valid JSON, never NaN/Infinity
    'STRICT_JSON': True,
    'COERCE_DECIMAL_TO_STRING': False,
}

QUASILAT = {
    'THREADS': int(os.environ.get('QUASILAT_THREADS', os.cpu_count() or 1)),
    'GOLDEN_DIR': os.path.join(BASE_DIR, 'golden'),
    'SCENARIO_DIR': os.path.join(BASE_DIR, 'scenarios'),
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'quasilat': {
            'handlers': ['console'],
            'level': os.environ.get('QUASILAT_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
