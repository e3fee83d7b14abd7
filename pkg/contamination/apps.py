from django.apps import AppConfig


class ContaminationConfig(AppConfig):
    name = 'contamination'
    verbose_name = 'Mean-Shift Contamination'
