from django.apps import AppConfig


class PrecondAppConfig(AppConfig):
    """Diagonal-tile preconditioner solved by Lanczos-FOM."""

    name = 'precond_app'
