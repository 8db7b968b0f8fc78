from django.apps import AppConfig


class DenselaAppConfig(AppConfig):
    """Small dense kernels for Rayleigh-Ritz and Cholesky QR."""

    name = 'densela_app'
