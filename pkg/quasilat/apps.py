from django.apps import AppConfig


class QuasilatConfig(AppConfig):
    name = 'quasilat'
    verbose_name = 'Approximate lattices and coherent systems'
