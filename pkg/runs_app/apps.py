from django.apps import AppConfig


class RunsAppConfig(AppConfig):
    """Matrix input, management commands and JSON reports."""

    name = 'runs_app'
