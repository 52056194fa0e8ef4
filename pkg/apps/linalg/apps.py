from django.apps import AppConfig


class LinalgConfig(AppConfig):
    name = 'apps.linalg'
