"""
Lower and upper Beurling densities over sequences of centered boxes.

For every radius r_n the count |ps ∩ (x + K_n)| is scanned over a grid of
translates x; the inf and sup, divided by the box measure, are the per-n
lower and upper estimates.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import exceptions
from .conf import quasilat_settings, thread_count
from .pointset import Lattice

logger = logging.getLogger(__name__)

# coordinate-compressed prefix tables above this many cells use the sweep
_PREFIX_LIMIT = 4_000_000

CONVENTIONS = ('half-open', 'closed')


@dataclass(frozen=True)
class FolnerBoxes:
    """
    The boxes K_n = [-r_n, r_n]^d with Lebesgue measure (2 r_n)^d.
    """
    dim: int
    radii: tuple

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if not radii:
            raise ValueError('at least one radius is required')
        if radii[0] <= 0 or any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError('radii must be positive and strictly increasing: %r' % (radii,))
        object.__setattr__(self, 'radii', radii)

    def __len__(self):
        return len(self.radii)

    def measure(self, n):
        return (2.0 * self.radii[n]) ** self.dim

    @property
    def measures(self):
        return [self.measure(n) for n in range(len(self))]

    @classmethod
    def linear(cls, dim, r_max, count):
        return cls(dim, tuple(np.linspace(r_max / count, r_max, count)))


@dataclass(frozen=True)
class DensityReport:
    radii: List[float]
    measures: List[float]
    lower_counts: List[int]
    upper_counts: List[int]
    lower_estimates: List[float]
    upper_estimates: List[float]
    D_minus: float
    D_plus: float
    slope_minus: float
    slope_plus: float
    richardson_minus: Optional[float]
    richardson_plus: Optional[float]
    translate_step: float
    scan_region_radius: float
    n_translates: int
    box_convention: str


def _check_convention(convention):
    convention = convention or quasilat_settings.BOX_CONVENTION
    if convention not in CONVENTIONS:
        raise ValueError('unknown box convention %r' % (convention,))
    return convention


def count_in_translate(ps, center, r, closed=True):
    """
    Number of points in x + [-r, r]^d. Points within DEDUP_TOL of the
    boundary count as inside for closed boxes; `closed=False` counts the
    half-open box [x - r, x + r)^d instead.
    """
    tol = quasilat_settings.DEDUP_TOL
    center = np.asarray(center, dtype=float).reshape(ps.dim)
    if not ps.exhaustive and float(np.max(np.abs(center))) + r > ps.truncation_radius + tol:
        raise exceptions.InsufficientTruncation(
            center=center.tolist(), radius=r, truncation_radius=ps.truncation_radius)
    if not len(ps):
        return 0
    lo = center - r - tol
    if closed:
        inside = (ps.points >= lo) & (ps.points <= center + r + tol)
    else:
        inside = (ps.points >= lo) & (ps.points < center + r - tol)
    return int(np.all(inside, axis=1).sum())


class _BoxCounter:
    """
    Counts points in every box of a product grid of centers at once.
    """

    def __init__(self, points, dim, convention, tol):
        self.dim = dim
        self.closed = convention == 'closed'
        self.tol = tol
        self.points = points
        self.xs = np.sort(points[:, 0]) if len(points) else np.zeros(0)
        self.prefix = None
        if dim == 2 and len(points):
            ux = np.unique(points[:, 0])
            uy = np.unique(points[:, 1])
            if (len(ux) + 1) * (len(uy) + 1) <= _PREFIX_LIMIT:
                hist = np.zeros((len(ux), len(uy)), dtype=np.int64)
                np.add.at(hist, (np.searchsorted(ux, points[:, 0]), np.searchsorted(uy, points[:, 1])), 1)
                prefix = np.zeros((len(ux) + 1, len(uy) + 1), dtype=np.int64)
                prefix[1:, 1:] = hist.cumsum(axis=0).cumsum(axis=1)
                self.ux, self.uy, self.prefix = ux, uy, prefix
            else:
                order = np.argsort(points[:, 0], kind='stable')
                self.by_x = points[order]

    def _bounds(self, sorted_values, centers, r):
        lo = np.searchsorted(sorted_values, centers - r - self.tol, side='left')
        if self.closed:
            hi = np.searchsorted(sorted_values, centers + r + self.tol, side='right')
        else:
            hi = np.searchsorted(sorted_values, centers + r - self.tol, side='left')
        return lo, hi

    def counts(self, axis, r):
        """
        Counts for the centers axis x axis (or axis in 1-D).
        """
        if not len(self.points):
            return np.zeros((len(axis),) * self.dim, dtype=np.int64)
        if self.dim == 1:
            lo, hi = self._bounds(self.xs, axis, r)
            return hi - lo
        if self.prefix is not None:
            xl, xh = self._bounds(self.ux, axis, r)
            yl, yh = self._bounds(self.uy, axis, r)
            p = self.prefix
            return p[np.ix_(xh, yh)] - p[np.ix_(xl, yh)] - p[np.ix_(xh, yl)] + p[np.ix_(xl, yl)]
        out = np.empty((len(axis), len(axis)), dtype=np.int64)
        xl, xh = self._bounds(self.by_x[:, 0], axis, r)
        for i in range(len(axis)):
            ys = np.sort(self.by_x[xl[i]:xh[i], 1])
            lo, hi = self._bounds(ys, axis, r)
            out[i] = hi - lo
        return out


def default_translate_step(ps):
    """
    Half the minimal separation of the set.
    """
    separation = ps.min_separation()
    return 1.0 if separation is None else separation / 2.0


def _slope(radii, values):
    if len(values) < 3:
        return 0.0
    return float(np.polyfit(radii[-3:], values[-3:], 1)[0])


def _richardson(radii, values):
    """
    Extrapolate f(r) = D + c/r from the last two radii.
    """
    if len(values) < 2:
        return None
    r1, r2 = radii[-2], radii[-1]
    return float((r2 * values[-1] - r1 * values[-2]) / (r2 - r1))


def density_scan(ps, boxes, translate_step=None, scan_region_radius=None, convention=None):
    if boxes.dim != ps.dim:
        raise ValueError('box dimension %d does not match point set dimension %d' % (boxes.dim, ps.dim))
    convention = _check_convention(convention)
    tol = quasilat_settings.DEDUP_TOL
    r_max = boxes.radii[-1]
    if translate_step is None:
        translate_step = default_translate_step(ps)
    if not translate_step > 0:
        raise ValueError('translate step must be positive')

    admissible = ps.truncation_radius - r_max
    if scan_region_radius is None:
        scan_region_radius = max(admissible, 0.0) if ps.exhaustive else admissible
    if not ps.exhaustive and (admissible < -tol or scan_region_radius > admissible + tol):
        raise exceptions.InsufficientTruncation(
            'largest box and scan region do not fit in the truncation',
            r_max=r_max, scan_region_radius=scan_region_radius,
            truncation_radius=ps.truncation_radius)

    k = max(0, int(np.floor(scan_region_radius / translate_step + 1e-9)))
    axis = translate_step * np.arange(-k, k + 1)
    counter = _BoxCounter(ps.points, ps.dim, convention, tol)

    def extremes(r):
        counts = counter.counts(axis, r)
        return int(counts.min()), int(counts.max())

    radii = list(boxes.radii)
    workers = min(thread_count(), len(radii))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(extremes, radii))
    else:
        results = [extremes(r) for r in radii]

    measures = boxes.measures
    lower_counts = [lo for lo, _ in results]
    upper_counts = [hi for _, hi in results]
    lower = [c / m for c, m in zip(lower_counts, measures)]
    upper = [c / m for c, m in zip(upper_counts, measures)]
    logger.debug('density scan over %d translates: D- %.6g, D+ %.6g',
                 len(axis) ** ps.dim, lower[-1], upper[-1])
    return DensityReport(
        radii=radii,
        measures=measures,
        lower_counts=lower_counts,
        upper_counts=upper_counts,
        lower_estimates=lower,
        upper_estimates=upper,
        D_minus=lower[-1],
        D_plus=upper[-1],
        slope_minus=_slope(radii, lower),
        slope_plus=_slope(radii, upper),
        richardson_minus=_richardson(radii, lower),
        richardson_plus=_richardson(radii, upper),
        translate_step=float(translate_step),
        scan_region_radius=float(scan_region_radius),
        n_translates=len(axis) ** ps.dim,
        box_convention=convention,
    )


def van_hove_ratio(boxes, n, K_half_width):
    """
    mu(K_n K ∩ K_n^c K) / mu(K_n) for boxes and K = [-a, a]^d.
    """
    r = boxes.radii[n]
    a = float(K_half_width)
    if a < 0:
        raise ValueError('K half width must be non-negative')
    d = boxes.dim
    outer = (2 * r + 2 * a) ** d
    inner = max(2 * r - 2 * a, 0.0) ** d
    return (outer - inner) / (2 * r) ** d


def lattice_density(lat):
    if not isinstance(lat, Lattice):
        lat = Lattice(lat)
    return 1.0 / lat.covolume


def model_set_density(scheme):
    return scheme.window.measure / scheme.covolume


def closed_form_density(source):
    """
    The density of a lattice or model set recipe, or None for anything else.
    """
    from .pointset import CutAndProjectScheme, Window

    kind = source.get('kind')
    if kind == 'lattice':
        return lattice_density(Lattice(source['basis']))
    if kind == 'model_set':
        scheme = CutAndProjectScheme(source['total_basis'], d=source['d'], m=source['m'],
                                     window=Window(tuple(source['half_widths'])))
        return model_set_density(scheme)
    return None


def compare_schedules(ps, boxes_a, boxes_b, translate_step=None, convention=None):
    """
    Final estimates under two box schedules and their disagreement.
    """
    a = density_scan(ps, boxes_a, translate_step=translate_step, convention=convention)
    b = density_scan(ps, boxes_b, translate_step=translate_step, convention=convention)
    return {
        'a': {'D_minus': a.D_minus, 'D_plus': a.D_plus, 'r_max': boxes_a.radii[-1]},
        'b': {'D_minus': b.D_minus, 'D_plus': b.D_plus, 'r_max': boxes_b.radii[-1]},
        'delta_minus': abs(a.D_minus - b.D_minus),
        'delta_plus': abs(a.D_plus - b.D_plus),
    }


@dataclass(frozen=True)
class SubadditivityReport:
    holds: bool
    n_checked: int
    worst_slack: int
    sup_union: List[int]
    sup_parts: List[List[int]]


def union_subadditivity(union, parts, boxes, translate_step, scan_region_radius=None, convention=None):
    """
    Check count(union ∩ xK_n) <= sum over parts of count(part ∩ xK_n) at
    every scanned (x, n). Exact integer comparison.
    """
    convention = _check_convention(convention)
    tol = quasilat_settings.DEDUP_TOL
    r_max = boxes.radii[-1]
    everything = [union] + list(parts)
    fits = [s.truncation_radius - r_max for s in everything if not s.exhaustive]
    admissible = min(fits) if fits else 0.0
    if scan_region_radius is None:
        scan_region_radius = admissible
    if fits and (admissible < -tol or scan_region_radius > admissible + tol):
        raise exceptions.InsufficientTruncation(
            'largest box and scan region do not fit in every truncation',
            r_max=r_max, scan_region_radius=scan_region_radius)
    k = max(0, int(np.floor(scan_region_radius / translate_step + 1e-9)))
    axis = translate_step * np.arange(-k, k + 1)

    union_counter = _BoxCounter(union.points, union.dim, convention, tol)
    part_counters = [_BoxCounter(p.points, p.dim, convention, tol) for p in parts]
    holds = True
    worst = None
    checked = 0
    sup_union, sup_parts = [], [[] for _ in parts]
    for r in boxes.radii:
        lhs = union_counter.counts(axis, r)
        part_counts = [c.counts(axis, r) for c in part_counters]
        slack = sum(part_counts) - lhs
        holds = holds and bool((slack >= 0).all())
        worst = int(slack.min()) if worst is None else min(worst, int(slack.min()))
        checked += slack.size
        sup_union.append(int(lhs.max()))
        for i, pc in enumerate(part_counts):
            sup_parts[i].append(int(pc.max()))
    return SubadditivityReport(holds=holds, n_checked=checked, worst_slack=worst,
                               sup_union=sup_union, sup_parts=sup_parts)
