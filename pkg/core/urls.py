"""URL configuration for the blockeig project.

Only the JSON report API is routed; everything else is reached through
``manage.py`` commands.
"""
from django.urls import include, path

urlpatterns = [
    path('api/', include('runs_app.api.urls')),
]
