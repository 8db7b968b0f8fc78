from django.apps import AppConfig


class LobpcgAppConfig(AppConfig):
    """The LOBPCG eigensolver driver."""

    name = 'lobpcg_app'
