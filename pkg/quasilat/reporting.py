"""
JSON rendering and provenance for reports.

Reports go through REST framework's JSONRenderer with STRICT_JSON, so a
non-finite float anywhere in a report is an error rather than `NaN` text.
"""
import hashlib
import io
import json
import platform
from datetime import datetime, timezone

import django
import numpy as np
import rest_framework
import scipy
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

import quasilat
from .conf import DEFAULTS, quasilat_settings


def render_json(data, indent=2):
    return JSONRenderer().render(data, renderer_context={'indent': indent})


def parse_json(raw):
    if isinstance(raw, str):
        raw = raw.encode('utf-8')
    return JSONParser().parse(io.BytesIO(raw))


def effective_settings():
    """
    The tunables actually in force, defaults overlaid with QUASILAT.
    """
    values = {}
    for key in sorted(DEFAULTS):
        value = getattr(quasilat_settings, key)
        if isinstance(value, dict):
            value = {str(k): v for k, v in value.items()}
        values[key] = value
    # THREADS and output locations never change a result
    for key in ('THREADS', 'GOLDEN_DIR', 'SCENARIO_DIR'):
        values.pop(key, None)
    return values


def settings_hash(extra=None):
    payload = {'settings': effective_settings(), 'extra': extra or {}}
    canonical = json.dumps(payload, sort_keys=True, separators=(',', ':'), default=str)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def provenance(extra=None):
    return {
        'quasilat': quasilat.__version__,
        'python': platform.python_version(),
        'numpy': np.__version__,
        'scipy': scipy.__version__,
        'django': django.get_version(),
        'djangorestframework': rest_framework.VERSION,
        'settings_hash': settings_hash(extra),
        'timestamp': datetime.now(timezone.utc).isoformat(),
    }
