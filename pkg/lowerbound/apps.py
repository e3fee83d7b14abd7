from django.apps import AppConfig


class LowerboundConfig(AppConfig):
    name = 'lowerbound'
    verbose_name = 'Fourier-Matching Lower Bound'
