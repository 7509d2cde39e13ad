from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: only the management commands and the test runner use this
# project; nothing is served over HTTP.
SECRET_KEY = config(
    "SECRET_KEY",
    default="django-insecure-spherecone-local-key-not-for-deployment",
)

DEBUG = config("DEBUG", default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "rest_framework",
    "common",
    "specfun",
    "lds",
    "spheremap",
    "wce",
    "finance",
    "cli",
]

MIDDLEWARE = []


# Internationalization
# https://docs.djangoproject.com/en/6.0/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

REST_FRAMEWORK = {
    "DEFAULT_RENDERER_CLASSES": ["rest_framework.renderers.JSONRenderer"],
    "COERCE_DECIMAL_TO_STRING": False,
}


# Logging

LOG_LEVEL = config("LOG_LEVEL", default="INFO")

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
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        app: {"handlers": ["console"], "level": LOG_LEVEL, "propagate": False}
        for app in ["common", "specfun", "lds", "spheremap", "wce", "finance", "cli"]
    },
}


# Experiment defaults

SPHERECONE_DIRFILE = config("SPHERECONE_DIRFILE", default="")
SPHERECONE_SEED = config("SPHERECONE_SEED", default=20240101, cast=int)
SPHERECONE_REPLICATES = config("SPHERECONE_REPLICATES", default=128, cast=int)
SPHERECONE_ORACLE_SAMPLES = config(
    "SPHERECONE_ORACLE_SAMPLES", default=1_000_000, cast=int
)
