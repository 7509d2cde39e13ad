from django.apps import AppConfig


class LdsConfig(AppConfig):
    name = "lds"
