from django.apps import AppConfig


class DistAppConfig(AppConfig):
    """Simulated distributed layout and SpMM protocol."""

    name = 'dist_app'
