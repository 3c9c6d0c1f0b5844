"""
Desk-scale checks of the approximate lattice axioms: identity, symmetry,
Delone geometry, and a finite defect set F with sumset inside F + base.
"""
import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import exceptions
from .conf import quasilat_settings
from .pointset import sumset_truncated, sup_norms

logger = logging.getLogger(__name__)

_CHUNK = 2_000_000


@dataclass(frozen=True)
class DeloneReport:
    n_points: int
    min_separation: Optional[float]
    covering_radius: float
    interior_radius: float
    is_symmetric: bool
    contains_identity: bool


@dataclass(frozen=True)
class CoverResult:
    defect_set: np.ndarray
    k: int
    coverage_tol: float
    verified_region_radius: float
    candidate_radius: float
    n_covered: int
    minimal: Optional[bool] = None


@dataclass(frozen=True)
class ApproximateLatticeReport:
    delone: DeloneReport
    cover: CoverResult
    sumset_radius: float
    sumset_partial: bool
    minimal_cover: Optional[CoverResult] = None

    @property
    def is_approximate_lattice(self):
        return (self.delone.contains_identity and self.delone.is_symmetric
                and (self.delone.min_separation or 0) > 0 and self.cover.k >= 1)


def _probe_grid(dim, radius):
    per_axis = quasilat_settings.PROBES_PER_AXIS
    n = int(per_axis.get(dim, per_axis.get(str(dim), 201)))
    axis = np.linspace(-radius, radius, n)
    if dim == 1:
        return axis.reshape(-1, 1)
    return np.stack(np.meshgrid(*([axis] * dim), indexing='ij'), axis=-1).reshape(-1, dim)


def delone_report(ps, interior_margin):
    """
    Separation, covering radius over the interior region, and the symmetry
    and identity flags of a truncation.

    For a relatively dense set, min_separation <= 2 * covering_radius.
    """
    if not len(ps):
        raise exceptions.EmptyPointSet()
    if not 0 < interior_margin < ps.truncation_radius:
        raise exceptions.InsufficientTruncation(
            'interior margin must lie in (0, truncation radius)',
            interior_margin=interior_margin, truncation_radius=ps.truncation_radius)
    tol = quasilat_settings.DEDUP_TOL
    tree = ps.tree

    min_separation = ps.min_separation()

    interior = ps.truncation_radius - interior_margin
    dist, _ = tree.query(_probe_grid(ps.dim, interior), p=np.inf)
    covering_radius = float(dist.max())

    mirrored, _ = tree.query(-ps.points, p=np.inf)
    identity, _ = tree.query(np.zeros(ps.dim), p=np.inf)
    return DeloneReport(
        n_points=len(ps),
        min_separation=min_separation,
        covering_radius=covering_radius,
        interior_radius=interior,
        is_symmetric=bool(np.all(mirrored <= tol)),
        contains_identity=bool(identity <= tol),
    )


def _coverage(candidates, targets, base, tol):
    """
    covered[i, j] is True when targets[j] - candidates[i] is within tol of
    a base point.
    """
    covered = np.zeros((len(candidates), len(targets)), dtype=bool)
    if not len(base) or not len(targets):
        return covered
    tree = base.tree
    rows = max(1, _CHUNK // max(1, len(targets)))
    for start in range(0, len(candidates), rows):
        block = candidates[start:start + rows]
        diffs = (targets[None, :, :] - block[:, None, :]).reshape(-1, base.dim)
        dist, _ = tree.query(diffs, p=np.inf, distance_upper_bound=2 * tol)
        covered[start:start + len(block)] = (dist <= tol).reshape(len(block), len(targets))
    return covered


def _cover_problem(sumset, base, coverage_tol, candidate_radius):
    if sumset.dim != base.dim:
        raise exceptions.MalformedPointSet('dimension mismatch: %d vs %d' % (sumset.dim, base.dim))
    eps = quasilat_settings.DEDUP_TOL
    if base.exhaustive:
        if candidate_radius is None:
            candidate_radius = sumset.truncation_radius
        region = sumset.truncation_radius
    else:
        if candidate_radius is None:
            candidate_radius = min(sumset.truncation_radius, base.truncation_radius / 2.0)
        region = min(sumset.truncation_radius, base.truncation_radius - candidate_radius)
    if region <= 0:
        raise exceptions.InsufficientTruncation(
            'base truncation too small to verify any region',
            base_radius=base.truncation_radius, candidate_radius=candidate_radius)
    norms = sup_norms(sumset.points)
    targets = sumset.points[norms <= region + eps]
    candidates = sumset.points[norms <= candidate_radius + eps]
    # nearest to the origin first, then lexicographic
    order = np.lexsort(tuple(candidates.T[::-1]) + (sup_norms(candidates),))
    candidates = candidates[order]
    covered = _coverage(candidates, targets, base, coverage_tol)
    return candidates, targets, covered, float(region), float(candidate_radius)


def _greedy(candidates, targets, covered, max_iterations):
    uncovered = np.ones(len(targets), dtype=bool)
    chosen = []
    while uncovered.any():
        if len(chosen) >= max_iterations:
            raise exceptions.NotApproximatelyClosed(
                iterations=len(chosen), uncovered=int(uncovered.sum()))
        gains = covered[:, uncovered].sum(axis=1) if len(candidates) else np.zeros(0, dtype=int)
        if not len(gains) or gains.max() == 0:
            raise exceptions.NotApproximatelyClosed(
                iterations=len(chosen), uncovered=int(uncovered.sum()),
                first_uncovered=targets[np.argmax(uncovered)].tolist())
        best = int(np.argmax(gains))
        chosen.append(best)
        uncovered &= ~covered[best]
        logger.debug('cover step %d: picked %s, %d left', len(chosen),
                     candidates[best].tolist(), int(uncovered.sum()))
    return chosen


def find_cover_set(sumset, base, coverage_tol=None, candidate_radius=None, max_iterations=None):
    """
    Greedy set cover of the sumset by translates f + base, f drawn from the
    sumset itself. Ties go to the candidate closest to the origin, then to
    the lexicographically smallest one, so a lattice gets F = {0}.
    """
    coverage_tol = quasilat_settings.COVERAGE_TOL if coverage_tol is None else coverage_tol
    max_iterations = quasilat_settings.COVER_MAX_ITERATIONS if max_iterations is None else max_iterations
    candidates, targets, covered, region, candidate_radius = _cover_problem(
        sumset, base, coverage_tol, candidate_radius)
    chosen = _greedy(candidates, targets, covered, max_iterations)
    return CoverResult(
        defect_set=candidates[chosen].copy(),
        k=len(chosen),
        coverage_tol=float(coverage_tol),
        verified_region_radius=region,
        candidate_radius=candidate_radius,
        n_covered=len(targets),
    )


class _BudgetExhausted(Exception):
    pass


def _smaller_cover(covered, bound, budget):
    """
    Branch and bound for a cover with fewer than `bound` rows of `covered`.
    Each node branches on the candidates covering the uncovered target that
    the fewest candidates cover. Returns the best cover found, or None.
    """
    best = None
    nodes = 0

    def visit(chosen, uncovered):
        nonlocal best, bound, nodes
        if not uncovered.any():
            best, bound = list(chosen), len(chosen)
            return
        if len(chosen) + 1 >= bound:
            return
        nodes += 1
        if nodes > budget:
            raise _BudgetExhausted()
        open_targets = np.flatnonzero(uncovered)
        target = open_targets[np.argmin(covered[:, open_targets].sum(axis=0))]
        for i in np.flatnonzero(covered[:, target]):
            visit(chosen + [int(i)], uncovered & ~covered[i])

    visit([], np.ones(covered.shape[1], dtype=bool))
    return best


def minimal_cover(sumset, base, coverage_tol=None, candidate_radius=None, budget=None):
    """
    A smallest defect set F for the same region and candidates as
    find_cover_set. The greedy cover is the starting bound; `minimal` stays
    False when the search budget (EXHAUSTIVE_COVER_BUDGET nodes) runs out
    before the bound is proved optimal.
    """
    coverage_tol = quasilat_settings.COVERAGE_TOL if coverage_tol is None else coverage_tol
    budget = quasilat_settings.EXHAUSTIVE_COVER_BUDGET if budget is None else budget
    candidates, targets, covered, region, candidate_radius = _cover_problem(
        sumset, base, coverage_tol, candidate_radius)
    chosen = _greedy(candidates, targets, covered, quasilat_settings.COVER_MAX_ITERATIONS)
    minimal = True
    if len(chosen) > 1:
        try:
            better = _smaller_cover(covered, len(chosen), budget)
        except _BudgetExhausted:
            better, minimal = None, False
            logger.warning('cover search budget of %d nodes exhausted; k=%d not proved minimal',
                           budget, len(chosen))
        if better is not None:
            chosen = better
    return CoverResult(
        defect_set=candidates[chosen].copy(),
        k=len(chosen),
        coverage_tol=float(coverage_tol),
        verified_region_radius=region,
        candidate_radius=candidate_radius,
        n_covered=len(targets),
        minimal=minimal,
    )


def verify_cover(sumset, base, defect_set, coverage_tol=None, region=None):
    """
    Re-check, independently of how F was found, that every sumset point in
    the region lies within tolerance of F + base.
    """
    coverage_tol = quasilat_settings.COVERAGE_TOL if coverage_tol is None else coverage_tol
    region = sumset.truncation_radius if region is None else region
    targets = sumset.within(region)
    if not len(targets):
        return True
    defect_set = np.asarray(defect_set, dtype=float).reshape(-1, sumset.dim)
    if not len(defect_set):
        return False
    ok = np.zeros(len(targets), dtype=bool)
    for f in defect_set:
        dist, _ = base.tree.query(targets - f, p=np.inf)
        ok |= dist <= coverage_tol
    return bool(ok.all())


def minimal_cover_size(sumset, base, coverage_tol=None, candidate_radius=None, budget=None):
    """
    Size of a smallest cover; raises ValueError when the search budget
    does not settle it.
    """
    cover = minimal_cover(sumset, base, coverage_tol=coverage_tol, candidate_radius=candidate_radius,
                          budget=budget)
    if not cover.minimal:
        raise ValueError('cover search budget exhausted before k=%d was proved minimal' % cover.k)
    return cover.k


def approximate_lattice_report(ps, interior_margin, sumset_radius=None, coverage_tol=None,
                               candidate_radius=None):
    """
    Delone constants plus the greedy and the smallest cover of the sumset
    at half the truncation radius (unless told otherwise).
    """
    if sumset_radius is None:
        sumset_radius = ps.truncation_radius / 2.0
    delone = delone_report(ps, interior_margin)
    square = sumset_truncated(ps, ps, sumset_radius)
    cover = find_cover_set(square, ps, coverage_tol=coverage_tol, candidate_radius=candidate_radius)
    if cover.k > 1:
        smallest = minimal_cover(square, ps, coverage_tol=coverage_tol, candidate_radius=candidate_radius)
    else:
        smallest = replace(cover, minimal=True)
    logger.info('cover of the %d-point sumset: greedy k=%d, smallest k=%d on radius %g',
                len(square), cover.k, smallest.k, cover.verified_region_radius)
    return ApproximateLatticeReport(delone=delone, cover=cover, sumset_radius=float(sumset_radius),
                                    sumset_partial=square.partial, minimal_cover=smallest)
