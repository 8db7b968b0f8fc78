"""URL routing for runs app."""

# Third-party imports
from django.urls import path

# Local imports
from .views import LayoutView, SolveView

app_name = 'runs_app'

urlpatterns = [
    path('layout/<int:nd>/', LayoutView.as_view(), name='layout'),
    path('solve/', SolveView.as_view(), name='solve'),
]
