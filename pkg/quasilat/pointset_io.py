"""
CSV point-set files with a JSON sidecar holding the recipe.

    dim=2
    -1,0.5
    0,0

The sidecar `<stem>.json` carries dim, truncation_radius, partial and the
`source` recipe.
"""
import logging
import os
import warnings

import numpy as np
from rest_framework.exceptions import ParseError

from . import exceptions
from .pointset import PointSet, explicit_pointset
from .reporting import parse_json, render_json

logger = logging.getLogger(__name__)


def sidecar_path(path):
    return os.path.splitext(path)[0] + '.json'


def write_csv(ps, path):
    """
    Write the CSV and its sidecar; returns the sidecar path.
    """
    from .serializers import PointSetSidecarSerializer

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    np.savetxt(path, ps.points, fmt='%.17g', delimiter=',', header='dim=%d' % ps.dim, comments='')
    sidecar = sidecar_path(path)
    with open(sidecar, 'wb') as fh:
        fh.write(render_json(PointSetSidecarSerializer(ps).data))
    logger.info('wrote %d points to %s', len(ps), path)
    return sidecar


def _read_header(fh, path):
    header = fh.readline().strip()
    if not header.startswith('dim='):
        raise exceptions.MalformedPointSet('missing "dim=<d>" header', path=path)
    try:
        dim = int(header[4:])
    except ValueError:
        raise exceptions.MalformedPointSet('bad header %r' % header, path=path)
    if dim not in (1, 2):
        raise exceptions.MalformedPointSet('unsupported dimension %d' % dim, path=path)
    return dim


def read_csv(path):
    """
    Read a point set; the sidecar, when present, restores recipe and radius.
    """
    from .serializers import PointSetSidecarSerializer

    if not os.path.exists(path):
        raise exceptions.MalformedPointSet('no such file', path=path)
    with open(path) as fh:
        dim = _read_header(fh, path)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter('ignore', UserWarning)
                points = np.loadtxt(fh, delimiter=',', ndmin=2, dtype=float)
        except ValueError as exc:
            raise exceptions.MalformedPointSet(str(exc), path=path)
    if points.size == 0:
        points = np.zeros((0, dim))
    if points.shape[1] != dim:
        raise exceptions.MalformedPointSet(
            'expected %d columns, found %d' % (dim, points.shape[1]), path=path)
    if not np.all(np.isfinite(points)):
        raise exceptions.MalformedPointSet('non-finite coordinate', path=path)

    sidecar = sidecar_path(path)
    if not os.path.exists(sidecar):
        logger.info('%s has no sidecar, reading as an explicit point list', path)
        return explicit_pointset(points, dim=dim)

    with open(sidecar, 'rb') as fh:
        try:
            payload = parse_json(fh.read())
        except ParseError as exc:
            raise exceptions.MalformedPointSet('bad sidecar: %s' % exc.detail, path=sidecar)
    serializer = PointSetSidecarSerializer(data=payload)
    if not serializer.is_valid():
        raise exceptions.MalformedPointSet('bad sidecar', path=sidecar, errors=serializer.errors)
    meta = serializer.validated_data
    if meta['dim'] != dim:
        raise exceptions.MalformedPointSet('sidecar dim does not match the header', path=path)
    return PointSet(dim=dim, points=points, truncation_radius=meta['truncation_radius'],
                    source=meta['source'], partial=meta['partial'])
