"""
Scenario files and the consistency harness.

A scenario names a point set, the checks to run on it and, optionally, the
outcomes it expects. Running it generates the set, checks the approximate
lattice axioms, scans densities, analyses the coherent system and turns
the results into verdicts. Each verdict instantiates one necessary density
inequality, or states an expectation, and records both sides.
"""
import configparser
import logging
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import approxcheck, density, exceptions, gabor, padic, pointset
from .conf import quasilat_settings, thread_count
from .pointset_io import read_csv, write_csv
from .reporting import provenance
from .serializers import (ApproximateLatticeReportSerializer, DensityReportSerializer,
                          DualSystemSerializer, PAdicCoverResultSerializer,
                          PAdicDensityReportSerializer, PointSetSummarySerializer,
                          ScenarioSerializer, SpectralBoundsSerializer,
                          SubadditivityReportSerializer, VerdictSerializer)

logger = logging.getLogger(__name__)

# numerical slack for the monotonicity of nested least-squares problems
_MONOTONE_TOL = 1e-10


def load_scenario(path):
    """
    Parse and validate a scenario file; raises InvalidScenario or a
    serializer ValidationError.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise exceptions.InvalidScenario(str(exc), path=path)
    raw = {section: dict(parser.items(section)) for section in parser.sections()}
    serializer = ScenarioSerializer(data=raw, context={'base_dir': os.path.dirname(os.path.abspath(path))})
    serializer.is_valid(raise_exception=True)
    cfg = serializer.validated_data
    cfg['path'] = path
    return cfg


def build_pointset(recipe):
    kind = recipe['kind']
    if kind == 'lattice':
        return pointset.lattice_points_in_box(pointset.Lattice(recipe['basis']), recipe['radius'])
    if kind == 'fibonacci':
        return pointset.model_set_generate(pointset.fibonacci_scheme(recipe['window']), recipe['radius'])
    if kind == 'fibonacci_gabor':
        scheme = pointset.fibonacci_gabor_scheme(recipe['window'], recipe['beta'])
        return pointset.model_set_generate(scheme, recipe['radius'])
    if kind == 'model_set':
        scheme = pointset.CutAndProjectScheme(recipe['total_basis'], d=recipe['d'], m=recipe['m'],
                                              window=pointset.Window(tuple(recipe['half_widths'])))
        return pointset.model_set_generate(scheme, recipe['radius'])
    if kind == 'symmetrize':
        dim = len(recipe['sublattice'])
        base = pointset.explicit_pointset(np.asarray(recipe.get('points') or [], dtype=float).reshape(-1, dim),
                                          dim=dim)
        return pointset.symmetrize(base, pointset.Lattice(recipe['sublattice']), recipe['radius'])
    if kind == 'file':
        return read_csv(recipe['path'])
    raise exceptions.InvalidScenario('unknown point set kind %r' % (kind,))


def emit_pointset(recipe, out_path):
    """
    Generate the recipe and write it as CSV plus sidecar.
    """
    ps = build_pointset(recipe)
    write_csv(ps, out_path)
    return ps


def verdict(check, inequality, applicable, lhs=None, rhs=None, passed=None, note=''):
    if passed is None:
        passed = True
    return VerdictSerializer({
        'check': check,
        'inequality': inequality,
        'applicable': bool(applicable),
        'lhs': None if lhs is None else float(lhs),
        'rhs': None if rhs is None else float(rhs),
        'passed': bool(passed) if applicable else True,
        'note': note,
    }).data


def _approx_section(ps, settings, verdicts):
    margin = settings.get('interior_margin')
    if margin is None:
        margin = min(2.0, ps.truncation_radius / 4.0)
    report = approxcheck.approximate_lattice_report(
        ps, margin,
        sumset_radius=settings.get('sumset_radius'),
        coverage_tol=settings.get('coverage_tol'),
        candidate_radius=settings.get('candidate_radius'),
    )
    smallest = report.minimal_cover
    k = smallest.k if smallest is not None and smallest.minimal else report.cover.k
    square = pointset.sumset_truncated(ps, ps, report.sumset_radius)
    covers = [report.cover] + ([smallest] if smallest is not None else [])
    verified = all(approxcheck.verify_cover(square, ps, cover.defect_set, coverage_tol=cover.coverage_tol,
                                            region=cover.verified_region_radius)
                   for cover in covers)
    verdicts.append(verdict(
        'approximate_lattice_axioms',
        '0 in L, L = -L, L + L within F + L on the verified region',
        True, lhs=k, passed=report.is_approximate_lattice and verified,
    ))
    data = ApproximateLatticeReportSerializer(report).data
    data['cover_reverified'] = verified
    data['k'] = k
    return k, data


def _centers(extent, count):
    axis = np.linspace(-extent, extent, count) if count > 1 else np.zeros(1)
    return [np.array([x, xi]) for x in axis for xi in axis]


# recipes the density scan may rebuild at a larger radius
_REGENERABLE = ('lattice', 'model_set', 'symmetrize')


def density_pointset(ps, settings=None):
    """
    The set the density scan runs on. Recipe-described sets are rebuilt at
    the density radius (setting DENSITY_RADIUS unless the scenario names
    one), so the boxes can grow well past the small truncations of the
    coherent checks. Anything else is scanned as given.
    """
    settings = settings or {}
    radius = settings.get('radius') or max(quasilat_settings.DENSITY_RADIUS, ps.truncation_radius)
    if ps.kind not in _REGENERABLE or radius == ps.truncation_radius:
        return ps
    logger.debug('density scan on the %s recipe at radius %g', ps.kind, radius)
    return pointset.regenerate(dict(ps.source, radius=float(radius)))


def scan_density(ps, settings=None):
    """
    Density scan with the scenario defaults: four radii from R/8 to R/4 and a
    translate step of half the minimal separation.
    """
    settings = settings or {}
    radii = settings.get('radii') or list(np.linspace(ps.truncation_radius / 8, ps.truncation_radius / 4, 4))
    boxes = density.FolnerBoxes(ps.dim, radii)
    step = settings.get('translate_step') or density.default_translate_step(ps)
    dens = density.density_scan(ps, boxes, translate_step=step, convention=settings.get('convention'))
    return boxes, step, dens


def gabor_checks(ps, settings, k, dens, slack, verdicts):
    """
    Run the requested coherent-system checks and append their density
    verdicts; returns the report section and what was detected. `dens` is
    the density report of the set, usually scanned on a larger truncation.
    """
    d_pi = gabor.FORMAL_DEGREE
    a_floor = quasilat_settings.A_FLOOR
    grid = gabor.GridSpec(settings['T'], settings['dt'])
    window = gabor.window_from_spec(grid, settings['window'])
    system = gabor.GaborSystem(window, ps)
    checks = settings['checks']
    margin = settings.get('margin')
    out = {'grid': {'T': grid.T, 'dt': grid.dt, 'L': grid.L, 'xi_max': grid.xi_max},
           'window': settings['window'], 'formal_degree': d_pi}
    detected = {}

    if 'frame' in checks:
        n_max = settings['hermite_N']
        step_n = int(quasilat_settings.HERMITE_STEP)
        sizes = sorted(set(range(step_n, n_max + 1, step_n)) | {n_max})
        sweep = gabor.frame_bounds_sweep(system, sizes)
        last = sweep[-1]
        monotone = all(b.A_est <= a.A_est + _MONOTONE_TOL and b.B_est >= a.B_est - _MONOTONE_TOL
                       for a, b in zip(sweep, sweep[1:]))
        detected['frame'] = last.converged and last.A_est > a_floor
        out['frame'] = {
            'bounds': SpectralBoundsSerializer(last).data,
            'sweep': SpectralBoundsSerializer(sweep, many=True).data,
            'monotone': monotone,
            'detected': detected['frame'],
        }
        verdicts.append(verdict('finite_section_monotone',
                                'A_est(N) non-increasing and B_est(N) non-decreasing in N',
                                True, passed=monotone))
        verdicts.append(verdict('frame_lower_density', 'D-(L) >= d_pi (1 - slack)',
                                detected['frame'], lhs=dens.D_minus, rhs=d_pi * (1 - slack),
                                passed=dens.D_minus >= d_pi * (1 - slack)))

    if 'riesz' in checks:
        bounds = gabor.riesz_bounds(system, margin=margin, family_radius=settings.get('family_radius'))
        detected['riesz'] = bounds.A_est > a_floor
        out['riesz'] = {'bounds': SpectralBoundsSerializer(bounds).data, 'detected': detected['riesz']}
        verdicts.append(verdict('riesz_upper_density', 'D+(L) <= d_pi (1 + slack)',
                                detected['riesz'], lhs=dens.D_plus, rhs=d_pi * (1 + slack),
                                passed=dens.D_plus <= d_pi * (1 + slack)))

    if 'complete' in checks:
        probes = gabor.hermite_probes(grid, settings['probes'])
        residual = gabor.completeness_residual(system, probes, family_radius=settings.get('family_radius'))
        detected['complete'] = residual < quasilat_settings.COMPLETE_TOL
        out['complete'] = {'residual': residual, 'probes': settings['probes'],
                           'detected': detected['complete'],
                           'note': 'proxy on the span of the first Hermite functions'}
        rhs = d_pi / k * (1 - slack) if k else None
        verdicts.append(verdict('complete_lower_density', 'D-(L) >= (d_pi / k) (1 - slack)',
                                detected['complete'] and k is not None, lhs=dens.D_minus, rhs=rhs,
                                passed=rhs is not None and dens.D_minus >= rhs))

    if 'hap' in checks:
        K = settings['K']
        centers = _centers(settings['x_extent'], settings['x_grid'])
        table = gabor.hap_table(system, window, centers, [K / 2.0, K])
        by_x = {}
        for row in table:
            by_x.setdefault(tuple(row['x']), {})[row['K']] = row['residual']
        monotone = all(r[K] <= r[K / 2.0] + _MONOTONE_TOL for r in by_x.values())
        worst = max(r[K] for r in by_x.values())
        detected['hap'] = worst < quasilat_settings.HAP_TOL
        out['hap'] = {'K': K, 'max_residual': worst, 'monotone': monotone, 'table': table,
                      'detected': detected['hap']}
        verdicts.append(verdict('hap_monotone', 'residual(x, K) non-increasing in K', True, passed=monotone))
        verdicts.append(verdict('hap_lower_density', 'D-(L) >= d_pi (1 - slack)',
                                detected['hap'], lhs=dens.D_minus, rhs=d_pi * (1 - slack),
                                passed=dens.D_minus >= d_pi * (1 - slack)))

    if 'dual' in checks:
        try:
            dual = gabor.biorthogonal_dual(system, margin=margin)
        except exceptions.NotMinimal as exc:
            out['dual'] = {'minimal': False, 'detail': exc.as_dict()}
        else:
            delta = gabor.uniform_min_delta(system, margin=margin)
            product = delta * dual.interior_norm_sup
            out['dual'] = dict(DualSystemSerializer(dual).data, minimal=True, delta=delta, duality=product)
            verdicts.append(verdict('biorthogonality', '|<pi(l) g, h_l\'> - delta(l, l\')| <= BIO_TOL',
                                    True, lhs=dual.residual, rhs=quasilat_settings.BIO_TOL,
                                    passed=dual.residual <= quasilat_settings.BIO_TOL))
            verdicts.append(verdict('duality', 'delta * max |h_l| = 1 on the interior', True,
                                    lhs=product, rhs=1.0, passed=abs(product - 1.0) <= 1e-3))
            detected['uniformly_minimal'] = delta > a_floor
            separation = ps.min_separation()
            out['dual']['detected'] = detected['uniformly_minimal']
            out['dual']['min_separation'] = separation
            verdicts.append(verdict('minimal_upper_density', 'D+(L) <= d_pi (1 + slack)',
                                    detected['uniformly_minimal'], lhs=dens.D_plus, rhs=d_pi * (1 + slack),
                                    passed=dens.D_plus <= d_pi * (1 + slack)))
            verdicts.append(verdict('minimal_uniformly_discrete', 'min separation of L > 0',
                                    detected['uniformly_minimal'], lhs=separation, rhs=0.0,
                                    passed=separation is None or separation > 0))

    if 'squared_minimality' in checks:
        square = pointset.sumset_truncated(ps, ps, ps.truncation_radius)
        square_system = gabor.GaborSystem(window, square)
        delta = gabor.uniform_min_delta(square_system, margin=margin)
        _, _, square_density = scan_density(square)
        detected['squared_minimal'] = delta > a_floor
        rhs = d_pi * k * (1 + slack) if k else None
        out['squared_minimality'] = {'delta': delta, 'n_points': len(square),
                                     'D_plus': square_density.D_plus,
                                     'detected': detected['squared_minimal']}
        verdicts.append(verdict('squared_minimal_upper_density', 'D+(L + L) <= d_pi k (1 + slack)',
                                detected['squared_minimal'] and k is not None,
                                lhs=square_density.D_plus, rhs=rhs,
                                passed=rhs is not None and square_density.D_plus <= rhs))
    return out, detected


def _subadditivity_section(ps, boxes, step, verdicts):
    source = ps.source
    base = pointset.regenerate(source['base'])
    parts = [base, pointset.negate(base),
             pointset.lattice_points_in_box(pointset.Lattice(source['sublattice']), source['radius'])]
    report = density.union_subadditivity(ps, parts, boxes, step)
    verdicts.append(verdict('union_subadditivity', 'count(L\' ∩ xK_n) <= sum over parts of count(part ∩ xK_n)',
                            True, lhs=report.worst_slack, rhs=0, passed=report.holds))
    return SubadditivityReportSerializer(report).data


def _padic_section(settings, expect, verdicts):
    ms = padic.PAdicModelSet(settings['p'], settings['w'], settings['n_max'])
    report = padic.padic_density(ms, translate_depth=settings['depth'])
    out = {'density': PAdicDensityReportSerializer(report).data}
    expected = 2 * float(ms.w)
    tol = expect.get('density_tolerance', 0.02)
    verdicts.append(verdict('closed_form_density', '|D - 2w| <= tol * 2w', True,
                            lhs=report.density, rhs=expected,
                            passed=abs(report.density - expected) <= tol * expected))
    if settings['cover']:
        cover = padic.padic_cover_set(ms, candidate_radius=settings.get('candidate_radius'))
        out['cover'] = PAdicCoverResultSerializer(cover).data
        verdicts.append(verdict('padic_cover', 'L + L within F + L at depth n_max', True,
                                lhs=cover.k, passed=cover.verified))
    return out


def run_scenario(cfg):
    """
    Execute a validated scenario and return its report.
    """
    meta = cfg['scenario']
    expect = cfg.get('expect') or {}
    slack = expect.get('slack')
    slack = quasilat_settings.CONSISTENCY_SLACK if slack is None else slack
    report = {'scenario': meta['name'], 'description': meta.get('description', ''), 'slack': slack}
    verdicts = []
    detected = {}
    k = None
    logger.info('running scenario %s', meta['name'])

    if cfg.get('pointset'):
        ps = build_pointset(cfg['pointset'])
        report['pointset'] = PointSetSummarySerializer(ps).data

        approx = cfg.get('approx') or {}
        if approx.get('enabled', True):
            k, report['approx'] = _approx_section(ps, approx, verdicts)

        dens_ps = density_pointset(ps, cfg.get('density'))
        boxes, step, dens = scan_density(dens_ps, cfg.get('density'))
        report['density'] = DensityReportSerializer(dens).data
        report['density']['truncation_radius'] = dens_ps.truncation_radius
        report['density']['n_points'] = len(dens_ps)
        closed = density.closed_form_density(ps.source)
        report['density']['closed_form'] = closed
        target = expect.get('density')
        if target is not None:
            tol = expect.get('density_tolerance', 0.02)
            worst = max(abs(dens.D_minus - target), abs(dens.D_plus - target))
            verdicts.append(verdict('closed_form_density', 'max |D -/+ - rho| <= tol * rho', True,
                                    lhs=worst, rhs=tol * target, passed=worst <= tol * target,
                                    note='%s boxes' % dens.box_convention))

        if ps.kind == 'symmetrize':
            report['subadditivity'] = _subadditivity_section(dens_ps, boxes, step, verdicts)

        if cfg.get('gabor'):
            report['gabor'], detected = gabor_checks(ps, cfg['gabor'], k, dens, slack, verdicts)

    if cfg.get('padic'):
        report['padic'] = _padic_section(cfg['padic'], expect, verdicts)
        if cfg['padic']['cover']:
            k = report['padic']['cover']['k']

    for flag in ('frame', 'riesz', 'complete', 'hap'):
        wanted = expect.get(flag)
        if wanted is None:
            continue
        seen = detected.get(flag)
        verdicts.append(verdict('expected_%s' % flag, '%s detected == %s' % (flag, wanted), True,
                                passed=seen is not None and seen == wanted,
                                note='' if seen is not None else 'check not run'))
    if expect.get('k') is not None:
        verdicts.append(verdict('expected_k', 'k == %d' % expect['k'], True, lhs=k, rhs=expect['k'],
                                passed=k == expect['k']))

    report['verdicts'] = verdicts
    report['passed'] = all(v['passed'] for v in verdicts)
    report['provenance'] = provenance(extra=_hashable(cfg))
    return report


def _hashable(cfg):
    """
    The configuration without the file location.
    """
    return {key: value for key, value in cfg.items() if key != 'path'}


def run_scenarios(paths, parallel=False):
    """
    Load every scenario first, then run them; reports come back in input
    order whatever the thread count.
    """
    configs = [load_scenario(path) for path in paths]
    if parallel and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=min(thread_count(), len(configs))) as pool:
            return list(pool.map(run_scenario, configs))
    return [run_scenario(cfg) for cfg in configs]


def shipped_scenarios():
    directory = quasilat_settings.SCENARIO_DIR
    if not os.path.isdir(directory):
        return []
    return sorted(os.path.join(directory, name) for name in os.listdir(directory) if name.endswith('.cfg'))


__all__ = ['build_pointset', 'density_pointset', 'emit_pointset', 'gabor_checks', 'load_scenario',
           'run_scenario', 'run_scenarios', 'scan_density', 'shipped_scenarios']
