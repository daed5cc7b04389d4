from django.apps import AppConfig


class EkmanConfig(AppConfig):
    name = 'ekman'
    verbose_name = 'Ekman spiral simulator'
