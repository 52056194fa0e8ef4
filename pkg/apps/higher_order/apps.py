from django.apps import AppConfig


class HigherOrderConfig(AppConfig):
    name = 'apps.higher_order'
