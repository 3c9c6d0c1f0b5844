"""
A sampled model of L^2(R) carrying the Schrodinger representation

    pi(x, xi) f(t) = exp(2 pi i xi t) f(t - x)

with cocycle sigma((x, xi), (x', xi')) = exp(-2 pi i xi' x) and formal degree
1 under Lebesgue measure. Coherent families pi(Lambda) g over a PointSet in
the time-frequency plane are analysed through their Gram matrix, finite
sections of the frame operator on Hermite functions, biorthogonal duals and
least-squares residuals.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import List

import numpy as np
import scipy.linalg
from scipy.interpolate import CubicSpline

from . import exceptions
from .conf import quasilat_settings, thread_count
from .pointset import sup_norms

logger = logging.getLogger(__name__)

FORMAL_DEGREE = 1.0


@dataclass(frozen=True)
class GridSpec:
    """
    Symmetric sample grid on [-T, T] with step dt and trapezoid weights.
    """
    T: float
    dt: float

    def __post_init__(self):
        if not (self.T > 0 and self.dt > 0):
            raise ValueError('grid needs T > 0 and dt > 0')
        if self.L < 8:
            raise ValueError('grid needs at least 8 samples, got %d' % self.L)

    @property
    def L(self):
        return int(np.floor(2 * self.T / self.dt + 1e-9)) + 1

    @property
    def xi_max(self):
        return 1.0 / (4.0 * self.dt)

    @property
    def shift_range(self):
        return self.T / 2.0

    @cached_property
    def t(self):
        t = self.dt * (np.arange(self.L) - (self.L - 1) / 2.0)
        t.setflags(write=False)
        return t

    @cached_property
    def weights(self):
        w = np.full(self.L, self.dt)
        w[0] = w[-1] = self.dt / 2.0
        w.setflags(write=False)
        return w


@dataclass(frozen=True, eq=False)
class Waveform:
    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex).reshape(-1)
        if len(samples) != self.grid.L:
            raise exceptions.MalformedWaveform(
                'expected %d samples, got %d' % (self.grid.L, len(samples)))
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    def norm(self):
        return float(np.sqrt(max(inner(self, self).real, 0.0)))

    def normalized(self):
        n = self.norm()
        if n == 0:
            raise exceptions.MalformedWaveform('cannot normalize the zero waveform')
        return Waveform(self.grid, self.samples / n)

    def scaled(self, c):
        return Waveform(self.grid, self.samples * c)


def inner(f, g):
    """
    <f, g> = integral of f conj(g), by the trapezoid rule.
    """
    return complex(np.sum(f.grid.weights * f.samples * np.conj(g.samples)))


def zero_waveform(grid):
    return Waveform(grid, np.zeros(grid.L))


def gaussian_window(grid):
    """
    2^(1/4) exp(-pi t^2), unit norm.
    """
    return Waveform(grid, 2.0 ** 0.25 * np.exp(-np.pi * grid.t ** 2))


def hermite_basis(grid, N):
    """
    The first N Hermite functions h_n(t) = (2 pi)^(1/4) psi_n(sqrt(2 pi) t),
    orthonormal in L^2(R); h_0 is the Gaussian window.
    """
    if N < 1:
        raise ValueError('need at least one Hermite function')
    u = np.sqrt(2.0 * np.pi) * grid.t
    psi = np.empty((N, grid.L))
    psi[0] = np.pi ** -0.25 * np.exp(-u ** 2 / 2.0)
    if N > 1:
        psi[1] = np.sqrt(2.0) * u * psi[0]
    for n in range(2, N):
        psi[n] = np.sqrt(2.0 / n) * u * psi[n - 1] - np.sqrt((n - 1) / n) * psi[n - 2]
    return (2.0 * np.pi) ** 0.25 * psi


def hermite_function(grid, n):
    return Waveform(grid, hermite_basis(grid, n + 1)[n])


def waveform_from_samples(grid, t, values):
    """
    Resample (t, values) onto the grid; zero outside the sampled interval.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=complex)
    spline = CubicSpline(t, np.column_stack([values.real, values.imag]), extrapolate=False)
    resampled = np.nan_to_num(spline(grid.t), nan=0.0)
    return Waveform(grid, resampled[:, 0] + 1j * resampled[:, 1])


def read_window_csv(path, grid):
    """
    Rows `t,re` or `t,re,im`.
    """
    try:
        data = np.loadtxt(path, delimiter=',', ndmin=2, comments='#')
    except (OSError, ValueError) as exc:
        raise exceptions.MalformedWaveform(str(exc), path=path)
    if data.shape[1] not in (2, 3) or len(data) < 4:
        raise exceptions.MalformedWaveform('expected at least 4 rows of t,re[,im]', path=path)
    values = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0)
    return waveform_from_samples(grid, data[:, 0], values)


def window_from_spec(grid, spec):
    """
    'gaussian', 'hermite:<n>' or a path to a CSV window.
    """
    if spec in (None, '', 'gaussian'):
        return gaussian_window(grid)
    if spec.startswith('hermite:'):
        return hermite_function(grid, int(spec.split(':', 1)[1]))
    return read_window_csv(spec, grid)


def _shifted(samples, grid, xs):
    """
    Rows f(t - x) for every x. Grid-multiple shifts move samples exactly;
    other shifts evaluate a cubic spline of f.
    """
    xs = np.asarray(xs, dtype=float).reshape(-1)
    out = np.zeros((len(xs), grid.L), dtype=complex)
    steps = xs / grid.dt
    nearest = np.round(steps)
    on_grid = np.abs(steps - nearest) < 1e-9
    L = grid.L
    for i in np.flatnonzero(on_grid):
        m = int(nearest[i])
        if m >= L or m <= -L:
            continue
        if m >= 0:
            out[i, m:] = samples[:L - m]
        else:
            out[i, :L + m] = samples[-m:]
    off = np.flatnonzero(~on_grid)
    if len(off):
        spline = CubicSpline(grid.t, np.column_stack([samples.real, samples.imag]), extrapolate=False)
        values = np.nan_to_num(spline(grid.t[None, :] - xs[off, None]), nan=0.0)
        out[off] = values[..., 0] + 1j * values[..., 1]
    return out


def _check_range(grid, points):
    tol = quasilat_settings.DEDUP_TOL
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if not len(points):
        return points
    bad_x = np.abs(points[:, 0]) > grid.shift_range + tol
    bad_xi = np.abs(points[:, 1]) > grid.xi_max + tol
    if bad_x.any() or bad_xi.any():
        first = points[np.flatnonzero(bad_x | bad_xi)[0]]
        raise exceptions.ShiftOutOfRange(point=first.tolist(), shift_range=grid.shift_range,
                                         xi_max=grid.xi_max)
    return points


def coherent_family(f, points):
    """
    Samples of pi(lambda) f for every lambda, one row each.
    """
    grid = f.grid
    points = _check_range(grid, points)
    if not len(points):
        return np.zeros((0, grid.L), dtype=complex)
    xs, index = np.unique(points[:, 0], return_inverse=True)
    shifted = _shifted(f.samples, grid, xs)[index.reshape(-1)]
    return shifted * np.exp(2j * np.pi * points[:, 1:2] * grid.t[None, :])


def tf_shift(f, x, xi):
    return Waveform(f.grid, coherent_family(f, [[x, xi]])[0])


def cocycle(z, z_prime):
    """
    pi(z) pi(z') = cocycle(z, z') pi(z + z').
    """
    return complex(np.exp(-2j * np.pi * z_prime[1] * z[0]))


def ambiguity(f, g, x, xi):
    """
    <f, pi(x, xi) g>.
    """
    return inner(f, tf_shift(g, x, xi))


def orthogonality_check(f, g, tf_grid_step, tf_radius):
    """
    Riemann sum of |<f, pi(x, xi) g>|^2 over the square time-frequency grid
    of the given step and radius; approximates ||f||^2 ||g||^2 / d_pi.
    """
    grid = f.grid
    if tf_radius > grid.shift_range or tf_radius > grid.xi_max:
        raise exceptions.ShiftOutOfRange(tf_radius=tf_radius, shift_range=grid.shift_range,
                                         xi_max=grid.xi_max)
    k = int(np.floor(tf_radius / tf_grid_step + 1e-9))
    axis = tf_grid_step * np.arange(-k, k + 1)
    shifted = _shifted(g.samples, grid, axis)
    products = f.samples[None, :] * np.conj(shifted) * grid.weights[None, :]
    kernel = np.exp(-2j * np.pi * axis[:, None] * grid.t[None, :])
    values = products @ kernel.T
    return float(np.sum(np.abs(values) ** 2) * tf_grid_step ** 2)


@dataclass(frozen=True, eq=False)
class GaborSystem:
    window: Waveform
    points: object
    formal_degree: float = FORMAL_DEGREE

    def __post_init__(self):
        if self.points.dim != 2:
            raise exceptions.MalformedPointSet(
                'coherent systems need points (x, xi) in R^2, got dim %d' % self.points.dim)

    @property
    def grid(self):
        return self.window.grid

    def family(self, points=None):
        return coherent_family(self.window, self.points.points if points is None else points)

    def interior_mask(self, points, margin):
        if self.points.exhaustive:
            return np.ones(len(points), dtype=bool)
        return sup_norms(points) <= self.points.truncation_radius - margin + quasilat_settings.DEDUP_TOL


@dataclass(frozen=True)
class SpectralBounds:
    A_est: float
    B_est: float
    subspace_dim: int
    converged: bool
    n_points: int


@dataclass(frozen=True, eq=False)
class DualSystem:
    points: np.ndarray
    duals: np.ndarray
    residual: float
    norm_sup: float
    interior_norm_sup: float
    min_eigenvalue: float

    @property
    def B_sup(self):
        return self.norm_sup ** 2

    def waveforms(self, grid):
        return [Waveform(grid, row) for row in self.duals]


def _gram(rows, weights):
    gram = (np.conj(rows) * weights[None, :]) @ rows.T
    return (gram + gram.conj().T) / 2.0


def _limit_family(points):
    if len(points) > quasilat_settings.MAX_POINTS:
        raise exceptions.FamilyTooLarge(n_points=len(points), limit=quasilat_settings.MAX_POINTS)


def gram_matrix(sys, points=None):
    """
    G[i][j] = <pi(lambda_j) g, pi(lambda_i) g>.
    """
    points = sys.points.points if points is None else np.asarray(points, dtype=float).reshape(-1, 2)
    _limit_family(points)
    return _gram(sys.family(points), sys.grid.weights)


def frame_bounds_sweep(sys, sizes):
    """
    Finite sections of the frame operator on the first N Hermite functions,
    for every N in `sizes`, all from one coefficient matrix so A_est is
    non-increasing and B_est non-decreasing in N.
    """
    sizes = sorted({int(n) for n in sizes})
    if not sizes or sizes[0] < 1:
        raise ValueError('test basis sizes must be positive')
    ps = sys.points
    n_max = sizes[-1]
    tol = quasilat_settings.DEDUP_TOL
    rho = float(np.sqrt(n_max / np.pi) + quasilat_settings.K_GUARD)
    if not ps.exhaustive and ps.truncation_radius < rho - tol:
        raise exceptions.TruncationTooSmall(required_radius=rho, truncation_radius=ps.truncation_radius)
    if not ps.exhaustive and sys.grid.shift_range < rho - tol:
        raise exceptions.TruncationTooSmall(
            'sampling grid too short for test basis', required_radius=rho,
            shift_range=sys.grid.shift_range)
    points = ps.within(rho)
    _limit_family(points)

    grid = sys.grid
    rows = sys.family(points)
    hermite = hermite_basis(grid, n_max)
    coefficients = (hermite * grid.weights[None, :]) @ np.conj(rows).T
    frame = coefficients @ coefficients.conj().T
    frame = (frame + frame.conj().T) / 2.0

    rel_tol = quasilat_settings.CONVERGENCE_REL_TOL
    bounds = []
    previous = None
    for n in sizes:
        eigenvalues = scipy.linalg.eigvalsh(frame[:n, :n])
        a = max(float(eigenvalues[0]), 0.0)
        b = max(float(eigenvalues[-1]), a)
        converged = previous is not None and abs(a - previous) <= rel_tol * a
        bounds.append(SpectralBounds(a, b, n, converged, len(points)))
        logger.debug('frame section N=%d over %d points: A %.4g, B %.4g', n, len(points), a, b)
        previous = a
    return bounds


def frame_bounds(sys, N):
    step = int(quasilat_settings.HERMITE_STEP)
    sizes = [N - step, N] if N > step else [N]
    return frame_bounds_sweep(sys, sizes)[-1]


def riesz_bounds(sys, margin=None, family_radius=None):
    """
    Extremal Gram eigenvalues on the interior sub-family.
    """
    margin = quasilat_settings.RIESZ_EDGE_MARGIN if margin is None else margin
    ps = sys.points
    points = ps.points
    if family_radius is not None:
        points = ps.within(family_radius)
    points = points[sys.interior_mask(points, margin)]
    if not len(points):
        raise exceptions.EmptyPointSet('no points left in the interior sub-family')
    eigenvalues = scipy.linalg.eigvalsh(gram_matrix(sys, points))
    a = max(float(eigenvalues[0]), 0.0)
    b = max(float(eigenvalues[-1]), a)
    return SpectralBounds(a, b, len(points), True, len(points))


def biorthogonal_dual(sys, margin=None, points=None):
    """
    h_lambda = sum_mu (G^-1)[mu][lambda] pi(mu) g, so that
    <pi(lambda) g, h_lambda'> = delta(lambda, lambda').
    """
    margin = quasilat_settings.RIESZ_EDGE_MARGIN if margin is None else margin
    points = sys.points.points if points is None else np.asarray(points, dtype=float).reshape(-1, 2)
    _limit_family(points)
    grid = sys.grid
    rows = sys.family(points)
    gram = _gram(rows, grid.weights)
    min_eigenvalue = float(scipy.linalg.eigvalsh(gram)[0]) if len(points) else 0.0
    if min_eigenvalue <= quasilat_settings.EIG_TOL:
        raise exceptions.NotMinimal(min_eigenvalue=min_eigenvalue)
    inverse = scipy.linalg.inv(gram)
    duals = inverse.T @ rows
    cross = (rows * grid.weights[None, :]) @ np.conj(duals).T
    residual = float(np.max(np.abs(cross - np.eye(len(points)))))
    norms = np.sqrt(np.sum(grid.weights[None, :] * np.abs(duals) ** 2, axis=1))
    interior = sys.interior_mask(points, margin)
    interior_sup = float(norms[interior].max()) if interior.any() else float('nan')
    if residual > quasilat_settings.BIO_TOL:
        logger.warning('biorthogonality residual %.3g above tolerance', residual)
    return DualSystem(points=points, duals=duals, residual=residual, norm_sup=float(norms.max()),
                      interior_norm_sup=interior_sup, min_eigenvalue=min_eigenvalue)


def minimality_distances(sys, margin=None, points=None):
    """
    Distance from each interior pi(lambda) g to the span of all the others.
    """
    margin = quasilat_settings.RIESZ_EDGE_MARGIN if margin is None else margin
    points = sys.points.points if points is None else np.asarray(points, dtype=float).reshape(-1, 2)
    gram = gram_matrix(sys, points)
    interior = np.flatnonzero(sys.interior_mask(points, margin))
    if len(points) == 1:
        return np.sqrt(np.maximum(gram.real.diagonal(), 0.0))
    if scipy.linalg.eigvalsh(gram)[0] > quasilat_settings.EIG_TOL:
        inverse = scipy.linalg.inv(gram)
        squared = 1.0 / inverse.real.diagonal()[interior]
    else:
        squared = np.empty(len(interior))
        for n, i in enumerate(interior):
            others = np.delete(np.arange(len(points)), i)
            rhs = gram[others, i]
            coef = scipy.linalg.lstsq(gram[np.ix_(others, others)], rhs)[0]
            squared[n] = gram[i, i].real - np.vdot(coef, rhs).real
    return np.sqrt(np.maximum(squared, 0.0))


def uniform_min_delta(sys, margin=None, points=None):
    distances = minimality_distances(sys, margin=margin, points=points)
    if not len(distances):
        raise exceptions.EmptyPointSet('no interior points')
    return float(distances.min())


def _residuals(rows, targets, weights):
    root = np.sqrt(weights)
    targets = np.atleast_2d(targets)
    rhs = (targets * root[None, :]).T
    if not len(rows):
        return np.linalg.norm(rhs, axis=0)
    matrix = (rows * root[None, :]).T
    coef = scipy.linalg.lstsq(matrix, rhs)[0]
    return np.linalg.norm(rhs - matrix @ coef, axis=0)


def hap_residual(sys, f, x, K_radius):
    """
    Distance from pi(x) f to the span of pi(lambda) g over lambda in
    x + [-K, K]^2.
    """
    x = np.asarray(x, dtype=float).reshape(2)
    ps = sys.points
    if not ps.exhaustive and float(np.max(np.abs(x))) + K_radius > ps.truncation_radius + quasilat_settings.DEDUP_TOL:
        raise exceptions.InsufficientTruncation(center=x.tolist(), K_radius=K_radius,
                                                truncation_radius=ps.truncation_radius)
    local = ps.within(K_radius, center=x)
    if not len(local):
        return f.norm()
    _limit_family(local)
    target = coherent_family(f, x[None, :])
    return float(_residuals(sys.family(local), target, sys.grid.weights)[0])


def hap_table(sys, f, centers, K_radii):
    """
    Residuals for every (x, K); rows ordered by x then K.
    """
    centers = [np.asarray(c, dtype=float).reshape(2) for c in centers]
    jobs = [(c, K) for c in centers for K in sorted(K_radii)]

    def run(job):
        c, K = job
        return {'x': c.tolist(), 'K': float(K), 'residual': hap_residual(sys, f, c, K)}

    workers = min(thread_count(), len(jobs)) or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, jobs))
    return [run(job) for job in jobs]


def completeness_residual(sys, probes, family_radius=None):
    """
    Largest least-squares residual of the probes against the truncated
    family; a proxy for completeness on the span of the probes only.
    """
    if not probes:
        return 0.0
    points = sys.points.points if family_radius is None else sys.points.within(family_radius)
    _limit_family(points)
    targets = np.vstack([p.samples for p in probes])
    return float(np.max(_residuals(sys.family(points), targets, sys.grid.weights)))


def hermite_probes(grid, count) -> List[Waveform]:
    return [Waveform(grid, row) for row in hermite_basis(grid, count)]
