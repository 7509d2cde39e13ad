from django.apps import AppConfig


class SpheremapConfig(AppConfig):
    name = "spheremap"
