"""
Settings for the quasilat library are all namespaced in the QUASILAT setting.
For example your project's `settings.py` file might look like this:

QUASILAT = {
    'DEDUP_TOL': 1e-9,
    'THREADS': 4,
}

This module provides the `quasilat_settings` object, that is used to access
the library settings, checking for user settings first, then falling
back to the defaults.
"""
from django.conf import settings
from django.core.signals import setting_changed
from rest_framework.settings import APISettings

DEFAULTS = {
    # pointset
    'DEDUP_TOL': 1e-9,
    'MAX_ENUMERATION': 50_000_000,

    # approxcheck
    'COVERAGE_TOL': 1e-6,
    'COVER_MAX_ITERATIONS': 64,
    'PROBES_PER_AXIS': {1: 4001, 2: 201},
    'EXHAUSTIVE_COVER_BUDGET': 100_000,

    # density
    'BOX_CONVENTION': 'half-open',
    'DENSITY_RADIUS': 200.0,

    # gabor
    'INTERP_TOL': 1e-6,
    'EIG_TOL': 1e-10,
    'BIO_TOL': 1e-6,
    'A_FLOOR': 1e-2,
    'K_GUARD': 6.0,
    'HERMITE_STEP': 10,
    'CONVERGENCE_REL_TOL': 0.05,
    'MAX_POINTS': 2500,
    'RIESZ_EDGE_MARGIN': 1.0,
    'HAP_TOL': 0.05,
    'COMPLETE_TOL': 1e-3,

    # harness
    'CONSISTENCY_SLACK': 0.05,
    'THREADS': 1,
    'GOLDEN_DIR': 'golden',
    'SCENARIO_DIR': 'scenarios',
}


class QuasilatSettings(APISettings):
    """
    REST framework's settings object, reading the QUASILAT namespace instead
    of REST_FRAMEWORK. For example:

        from quasilat.conf import quasilat_settings
        print(quasilat_settings.DEDUP_TOL)
    """

    @property
    def user_settings(self):
        if not hasattr(self, '_user_settings'):
            self._user_settings = getattr(settings, 'QUASILAT', {})
        return self._user_settings


quasilat_settings = QuasilatSettings(None, DEFAULTS)


def thread_count():
    return max(1, int(quasilat_settings.THREADS))


def reload_quasilat_settings(*args, **kwargs):
    if kwargs['setting'] == 'QUASILAT':
        quasilat_settings.reload()


setting_changed.connect(reload_quasilat_settings)
