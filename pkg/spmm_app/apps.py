from django.apps import AppConfig


class SpmmAppConfig(AppConfig):
    """CSB_Coo storage and the local SpMM kernels."""

    name = 'spmm_app'
