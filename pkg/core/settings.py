"""
Django settings for the projlie verification toolkit.

The project has no web surface: Django provides configuration, logging and the management
commands (verify, trace, classify, sweep) of the projlie app.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.1/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "django-insecure-projlie-local-verification-runs-only")

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Django Default Apps
    "django.contrib.contenttypes",
    "django.contrib.auth",
    # Third Party Apps
    "rest_framework",
    # Custom Apps
    "projlie",
]

MIDDLEWARE = []


# Database
# The commands store nothing; Django only needs a configured backend.

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.1/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Logging
# PROJLIE_LOG selects the level of the projlie loggers (DEBUG, INFO, WARNING, ERROR).

PROJLIE_LOG = os.environ.get("PROJLIE_LOG", "WARNING").upper()
if PROJLIE_LOG not in ("DEBUG", "INFO", "WARNING", "ERROR"):
    PROJLIE_LOG = "WARNING"

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        "projlie": {
            "handlers": ["console"],
            "level": PROJLIE_LOG,
            "propagate": False,
        },
    },
}


# Verification defaults, overridable per run by the TOML config

PROJLIE_DEFAULT_SEED = int(os.environ.get("PROJLIE_SEED", "0"))
PROJLIE_DEFAULT_SAMPLES = int(os.environ.get("PROJLIE_SAMPLES", "100"))
PROJLIE_GEODESIC_STARTS = int(os.environ.get("PROJLIE_GEODESIC_STARTS", "20"))
PROJLIE_REPORT_SCHEMA_VERSION = 1
