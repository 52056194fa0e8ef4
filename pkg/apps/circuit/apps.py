from django.apps import AppConfig


class CircuitConfig(AppConfig):
    name = 'apps.circuit'
