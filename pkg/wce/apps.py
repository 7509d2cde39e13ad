from django.apps import AppConfig


class WceConfig(AppConfig):
    name = "wce"
