"""
WSGI entry point for the blockeig JSON API.

Exposes ``application`` for any WSGI server; ``manage.py runserver`` uses it
in development.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')

application = get_wsgi_application()
