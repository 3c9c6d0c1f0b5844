"""
Finite truncations of lattices, cut-and-project model sets and point sets
derived from them (symmetrizations, sumsets, translates, dilates).

A PointSet always remembers the recipe (`source`) it was built from, so any
set can be regenerated bit-for-bit with `regenerate(ps.source)`.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from . import exceptions
from .conf import quasilat_settings

logger = logging.getLogger(__name__)

GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0
GOLDEN_CONJUGATE = (1.0 - np.sqrt(5.0)) / 2.0

# chunk size (number of coordinates) for pairwise sums
_SUM_CHUNK = 4_000_000


def sup_norms(points):
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return np.zeros(len(points))
    return np.max(np.abs(points), axis=1)


def canonical_order(points):
    """
    Sort points lexicographically by their coordinates.
    """
    if len(points) < 2:
        return points
    order = np.lexsort(points.T[::-1])
    return points[order]


def dedup(points, tol=None):
    """
    Remove points closer than `tol` (sup-norm) to an earlier point.
    """
    tol = quasilat_settings.DEDUP_TOL if tol is None else tol
    if len(points) < 2:
        return points
    # exact-ish duplicates first, the tree only sees what is left
    keys = np.round(points / tol)
    _, first = np.unique(keys, axis=0, return_index=True)
    points = points[np.sort(first)]
    if len(points) < 2:
        return points
    pairs = cKDTree(points).query_pairs(r=tol, p=np.inf, output_type='ndarray')
    if len(pairs) == 0:
        return points
    keep = np.ones(len(points), dtype=bool)
    keep[pairs[:, 1]] = False
    return points[keep]


@dataclass(frozen=True, eq=False)
class PointSet:
    """
    A finite truncation of a discrete subset of R^d (d = 1 or 2).

    Every point lies in the closed sup-norm ball of `truncation_radius`.
    `partial` is set when the truncation is not guaranteed to contain every
    point of the underlying set inside that ball.
    """
    dim: int
    points: np.ndarray
    truncation_radius: float
    source: dict = field(default_factory=dict)
    partial: bool = False

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise exceptions.MalformedPointSet('unsupported dimension %r' % (self.dim,))
        points = np.array(self.points, dtype=float).reshape(-1, self.dim)
        points.setflags(write=False)
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'truncation_radius', float(self.truncation_radius))
        if self.truncation_radius <= 0:
            raise exceptions.MalformedPointSet('truncation radius must be positive')
        if len(points) and sup_norms(points).max() > self.truncation_radius + quasilat_settings.DEDUP_TOL:
            raise exceptions.MalformedPointSet(
                'point outside the truncation radius %g' % self.truncation_radius)

    def __len__(self):
        return len(self.points)

    @property
    def kind(self):
        return self.source.get('kind', 'explicit')

    @property
    def exhaustive(self):
        """
        Explicit point lists are complete: nothing exists beyond them.
        """
        return self.kind == 'explicit'

    @cached_property
    def tree(self):
        return cKDTree(self.points if len(self.points) else np.zeros((0, self.dim)))

    def within(self, radius, center=None):
        """
        The points inside the closed sup-norm box of `radius` around `center`.
        """
        pts = self.points
        if center is not None:
            pts = pts - np.asarray(center, dtype=float)
        mask = sup_norms(pts) <= radius + quasilat_settings.DEDUP_TOL
        return self.points[mask]

    def min_separation(self):
        """
        Smallest sup-norm distance between two distinct points, or None for
        fewer than two points.
        """
        if len(self.points) < 2:
            return None
        dist, _ = self.tree.query(self.points, k=2, p=np.inf)
        return float(dist[:, 1].min())

    def contains(self, point, tol=None):
        tol = quasilat_settings.DEDUP_TOL if tol is None else tol
        if not len(self.points):
            return False
        dist, _ = self.tree.query(np.asarray(point, dtype=float), p=np.inf)
        return bool(dist <= tol)

    def same_points(self, other, tol=None):
        tol = quasilat_settings.DEDUP_TOL if tol is None else tol
        if self.dim != other.dim or len(self) != len(other):
            return False
        return bool(np.all(np.abs(self.points - other.points) <= tol))


def _finish(dim, points, radius, source, partial=False, remove_duplicates=True):
    points = np.asarray(points, dtype=float).reshape(-1, dim)
    tol = quasilat_settings.DEDUP_TOL
    points = points[sup_norms(points) <= radius + tol]
    if remove_duplicates:
        points = dedup(points)
    return PointSet(dim=dim, points=canonical_order(points), truncation_radius=radius,
                    source=source, partial=partial)


def explicit_pointset(points, dim=None, truncation_radius=None):
    """
    A complete, finite point set given by its list of points.
    """
    points = np.asarray(points, dtype=float)
    if dim is None:
        if points.ndim != 2:
            raise exceptions.MalformedPointSet('cannot infer the dimension of an empty list')
        dim = points.shape[1]
    points = points.reshape(-1, dim)
    if truncation_radius is None:
        norms = sup_norms(points)
        truncation_radius = float(norms.max()) if len(norms) and norms.max() > 0 else 1.0
    points = canonical_order(dedup(points))
    source = {
        'kind': 'explicit',
        'dim': dim,
        'truncation_radius': float(truncation_radius),
        'points': points.tolist(),
    }
    return PointSet(dim=dim, points=points, truncation_radius=truncation_radius, source=source)


@dataclass(frozen=True, eq=False)
class Lattice:
    """
    The lattice B.Z^d generated by the columns of an invertible d x d basis.
    """
    basis: np.ndarray

    def __post_init__(self):
        basis = np.atleast_2d(np.array(self.basis, dtype=float))
        if basis.shape[0] != basis.shape[1]:
            raise exceptions.DegenerateLattice('lattice basis must be square, got %s' % (basis.shape,))
        cond = np.linalg.cond(basis)
        if not np.isfinite(cond) or cond > 1e12:
            raise exceptions.DegenerateLattice()
        basis.setflags(write=False)
        object.__setattr__(self, 'basis', basis)

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def covolume(self):
        return float(abs(np.linalg.det(self.basis)))

    @classmethod
    def diagonal(cls, *spacings):
        return cls(np.diag(spacings))


@dataclass(frozen=True)
class Window:
    """
    The centered box [-w_1, w_1] x ... x [-w_m, w_m] in internal space.
    """
    half_widths: tuple

    def __post_init__(self):
        widths = tuple(float(w) for w in np.atleast_1d(self.half_widths))
        if not widths or any(not w > 0 for w in widths):
            raise exceptions.InvalidWindow(half_widths=list(widths))
        object.__setattr__(self, 'half_widths', widths)

    @property
    def dim(self):
        return len(self.half_widths)

    @property
    def measure(self):
        return float(np.prod([2.0 * w for w in self.half_widths]))


@dataclass(frozen=True, eq=False)
class CutAndProjectScheme:
    """
    A lattice Gamma in R^d x R^m given by the columns of `total_basis`; the
    first d rows are the physical coordinates, the last m rows the internal
    ones.
    """
    total_basis: np.ndarray
    d: int
    m: int
    window: Window

    def __post_init__(self):
        basis = np.atleast_2d(np.array(self.total_basis, dtype=float))
        size = self.d + self.m
        if basis.shape != (size, size):
            raise exceptions.DegenerateLattice(
                'total basis must be %dx%d, got %s' % (size, size, basis.shape))
        cond = np.linalg.cond(basis)
        if not np.isfinite(cond) or cond > 1e12:
            raise exceptions.DegenerateLattice()
        if not isinstance(self.window, Window):
            object.__setattr__(self, 'window', Window(self.window))
        if self.window.dim != self.m:
            raise exceptions.InvalidWindow('window dimension %d does not match m=%d'
                                           % (self.window.dim, self.m))
        basis.setflags(write=False)
        object.__setattr__(self, 'total_basis', basis)

    @property
    def covolume(self):
        return float(abs(np.linalg.det(self.total_basis)))

    @property
    def physical(self):
        return self.total_basis[:self.d]

    @property
    def internal(self):
        return self.total_basis[self.d:]

    def as_source(self, radius):
        return {
            'kind': 'model_set',
            'total_basis': self.total_basis.tolist(),
            'd': self.d,
            'm': self.m,
            'half_widths': list(self.window.half_widths),
            'radius': float(radius),
        }


def fibonacci_scheme(window_half_width=1.0):
    """
    Gamma = {(n + m tau, n + m tau') : n, m in Z}, covolume sqrt(5).
    """
    basis = [[1.0, GOLDEN_RATIO],
             [1.0, GOLDEN_CONJUGATE]]
    return CutAndProjectScheme(basis, d=1, m=1, window=Window((window_half_width,)))


def fibonacci_gabor_scheme(window_half_width=1.0, beta=0.5):
    """
    The Fibonacci chain in time times beta.Z in frequency, as one scheme
    with physical space R^2 and internal space R.
    """
    basis = [[1.0, GOLDEN_RATIO, 0.0],
             [0.0, 0.0, beta],
             [1.0, GOLDEN_CONJUGATE, 0.0]]
    return CutAndProjectScheme(basis, d=2, m=1, window=Window((window_half_width,)))


def star_map(n, m):
    """
    Internal coordinate of the Fibonacci lattice point with integer
    coordinates (n, m).
    """
    return n + m * GOLDEN_CONJUGATE


def _integer_points(basis, bounds, tol):
    """
    All integer vectors z with |(basis @ z)_r| <= bounds_r for every row r.

    The outer coordinates range over the box implied by the inverse basis;
    the last coordinate is solved for row by row as an interval, so no
    candidate is generated that cannot satisfy every row.
    """
    basis = np.asarray(basis, dtype=float)
    bounds = np.asarray(bounds, dtype=float)
    k = basis.shape[1]
    limit = int(quasilat_settings.MAX_ENUMERATION)
    inv = np.linalg.inv(basis)
    extent = np.floor(np.abs(inv) @ (bounds + tol)).astype(np.int64)

    n_outer = int(np.prod(2 * extent[:-1] + 1)) if k > 1 else 1
    if n_outer > limit:
        raise exceptions.EnumerationBoundExceeded(
            'enumeration bound exceeded: %d outer candidates (limit %d)' % (n_outer, limit),
            extent=extent.tolist(), limit=limit)

    if k == 1:
        outer = np.zeros((1, 0), dtype=np.int64)
    else:
        axes = [np.arange(-e, e + 1, dtype=np.int64) for e in extent[:-1]]
        outer = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, k - 1)

    partial_sums = outer @ basis[:, :-1].T
    last_column = basis[:, -1]
    lo = np.full(len(outer), -float(extent[-1]))
    hi = np.full(len(outer), float(extent[-1]))
    for row in range(basis.shape[0]):
        coef = last_column[row]
        bound = bounds[row] + tol
        if abs(coef) < 1e-15:
            lo[np.abs(partial_sums[:, row]) > bound] = np.inf
            continue
        a = (-bound - partial_sums[:, row]) / coef
        b = (bound - partial_sums[:, row]) / coef
        lo = np.maximum(lo, np.minimum(a, b))
        hi = np.minimum(hi, np.maximum(a, b))

    lo_int = np.ceil(lo)
    hi_int = np.floor(hi)
    feasible = np.isfinite(lo_int) & np.isfinite(hi_int) & (hi_int >= lo_int)
    counts = np.where(feasible, hi_int - lo_int + 1, 0).astype(np.int64)
    total = int(counts.sum())
    if total > limit:
        raise exceptions.EnumerationBoundExceeded(
            'enumeration bound exceeded: %d candidates (limit %d)' % (total, limit),
            extent=extent.tolist(), limit=limit)

    rows = np.repeat(np.arange(len(outer)), counts)
    starts = np.where(feasible, lo_int, 0).astype(np.int64)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    last = np.repeat(starts, counts) + offsets
    z = np.column_stack([outer[rows], last]) if k > 1 else last.reshape(-1, 1)

    y = z @ basis.T
    keep = np.all(np.abs(y) <= bounds + tol, axis=1)
    return z[keep], y[keep]


def lattice_points_in_box(lat, radius):
    """
    { B.z : z in Z^d } intersected with [-radius, radius]^d.
    """
    if not radius > 0:
        raise exceptions.InsufficientTruncation('radius must be positive')
    if not isinstance(lat, Lattice):
        lat = Lattice(lat)
    tol = quasilat_settings.DEDUP_TOL
    _, y = _integer_points(lat.basis, np.full(lat.dim, float(radius)), tol)
    source = {'kind': 'lattice', 'basis': lat.basis.tolist(), 'radius': float(radius)}
    logger.debug('lattice truncation at radius %g: %d points', radius, len(y))
    return _finish(lat.dim, y, float(radius), source, remove_duplicates=False)


def model_set_coordinates(scheme, radius):
    """
    Integer coordinates, physical parts and internal parts of every lattice
    point of the scheme that lands in the window with physical part inside
    the radius box. Internal parts come from the integer coordinates, never
    from the physical parts.
    """
    tol = quasilat_settings.DEDUP_TOL
    bounds = np.concatenate([np.full(scheme.d, float(radius)), scheme.window.half_widths])
    z, y = _integer_points(scheme.total_basis, bounds, tol)
    return z, y[:, :scheme.d], y[:, scheme.d:]


def model_set_generate(scheme, radius):
    """
    p_G(Gamma intersected with R^d x W), truncated to the radius box.
    """
    if not radius > 0:
        raise exceptions.InsufficientTruncation('radius must be positive')
    _, physical, _ = model_set_coordinates(scheme, radius)
    unique = dedup(physical)
    if len(unique) != len(physical):
        raise exceptions.NonInjectiveProjection(collisions=len(physical) - len(unique))
    logger.debug('model set at radius %g: %d points', radius, len(unique))
    return _finish(scheme.d, unique, float(radius), scheme.as_source(radius), remove_duplicates=False)


def symmetrize(ps, sublattice, radius):
    """
    ps, -ps and the sublattice truncation, merged.
    """
    if not isinstance(sublattice, Lattice):
        sublattice = Lattice(sublattice)
    if ps.dim != sublattice.dim:
        raise exceptions.MalformedPointSet(
            'dimension mismatch: point set %d, sublattice %d' % (ps.dim, sublattice.dim))
    partial = ps.partial
    if not ps.exhaustive and ps.truncation_radius < radius:
        logger.warning('symmetrizing a %g-truncation at radius %g: result may miss points',
                       ps.truncation_radius, radius)
        partial = True
    grid = lattice_points_in_box(sublattice, radius)
    merged = np.vstack([ps.points, -ps.points, grid.points])
    source = {
        'kind': 'symmetrize',
        'base': ps.source,
        'sublattice': sublattice.basis.tolist(),
        'radius': float(radius),
    }
    return _finish(ps.dim, merged, float(radius), source, partial=partial)


def sumset_truncated(a, b, radius):
    """
    { x + y : x in a, y in b } inside the radius box.
    """
    if a.dim != b.dim:
        raise exceptions.MalformedPointSet('dimension mismatch: %d vs %d' % (a.dim, b.dim))
    tol = quasilat_settings.DEDUP_TOL
    pieces = []
    if len(a) and len(b):
        rows = max(1, _SUM_CHUNK // max(1, len(b) * a.dim))
        for start in range(0, len(a), rows):
            sums = (a.points[start:start + rows, None, :] + b.points[None, :, :]).reshape(-1, a.dim)
            sums = sums[sup_norms(sums) <= radius + tol]
            if len(sums):
                pieces.append(dedup(sums))
    merged = np.vstack(pieces) if pieces else np.zeros((0, a.dim))

    complete = (
        (a.exhaustive and b.exhaustive)
        or a.truncation_radius >= radius + b.truncation_radius
        or b.truncation_radius >= radius + a.truncation_radius
    )
    source = {'kind': 'sumset', 'a': a.source, 'b': b.source, 'radius': float(radius)}
    return _finish(a.dim, merged, float(radius), source,
                   partial=not complete or a.partial or b.partial)


def translate(ps, offset):
    """
    ps + offset, truncated to the largest centered box inside the shifted
    truncation region.
    """
    offset = np.asarray(offset, dtype=float).reshape(ps.dim)
    shifted = ps.points + offset
    if ps.exhaustive:
        return explicit_pointset(shifted, dim=ps.dim,
                                 truncation_radius=ps.truncation_radius + float(np.max(np.abs(offset))))
    radius = ps.truncation_radius - float(np.max(np.abs(offset)))
    if radius <= 0:
        raise exceptions.InsufficientTruncation(offset=offset.tolist())
    source = {'kind': 'translate', 'base': ps.source, 'offset': offset.tolist()}
    return _finish(ps.dim, shifted, radius, source, partial=ps.partial, remove_duplicates=False)


def scale(ps, factor):
    """
    The dilate factor * ps.
    """
    if not factor > 0:
        raise ValueError('scale factor must be positive')
    if ps.exhaustive:
        return explicit_pointset(ps.points * factor, dim=ps.dim,
                                 truncation_radius=ps.truncation_radius * factor)
    source = {'kind': 'scale', 'base': ps.source, 'factor': float(factor)}
    return _finish(ps.dim, ps.points * factor, ps.truncation_radius * factor, source,
                   partial=ps.partial, remove_duplicates=False)


def negate(ps):
    if ps.exhaustive:
        return explicit_pointset(-ps.points, dim=ps.dim, truncation_radius=ps.truncation_radius)
    source = {'kind': 'negate', 'base': ps.source}
    return _finish(ps.dim, -ps.points, ps.truncation_radius, source,
                   partial=ps.partial, remove_duplicates=False)


def regenerate(source):
    """
    Rebuild a point set from its recipe.
    """
    kind = source.get('kind')
    if kind == 'explicit':
        return explicit_pointset(source['points'], dim=source['dim'],
                                 truncation_radius=source['truncation_radius'])
    if kind == 'lattice':
        return lattice_points_in_box(Lattice(source['basis']), source['radius'])
    if kind == 'model_set':
        scheme = CutAndProjectScheme(source['total_basis'], d=source['d'], m=source['m'],
                                     window=Window(tuple(source['half_widths'])))
        return model_set_generate(scheme, source['radius'])
    if kind == 'symmetrize':
        return symmetrize(regenerate(source['base']), Lattice(source['sublattice']), source['radius'])
    if kind == 'sumset':
        return sumset_truncated(regenerate(source['a']), regenerate(source['b']), source['radius'])
    if kind == 'translate':
        return translate(regenerate(source['base']), source['offset'])
    if kind == 'scale':
        return scale(regenerate(source['base']), source['factor'])
    if kind == 'negate':
        return negate(regenerate(source['base']))
    raise exceptions.MalformedPointSet('unknown recipe kind %r' % (kind,))
