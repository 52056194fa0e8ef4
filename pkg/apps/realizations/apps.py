from django.apps import AppConfig


class RealizationsConfig(AppConfig):
    name = 'apps.realizations'
