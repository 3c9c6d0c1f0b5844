import json
import os

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase

from quasilat import exceptions
from quasilat.approxcheck import (approximate_lattice_report, delone_report, find_cover_set, minimal_cover,
                                  minimal_cover_size, verify_cover)
from quasilat.pointset import (Lattice, explicit_pointset, fibonacci_scheme, lattice_points_in_box,
                               model_set_generate, sumset_truncated, symmetrize)


def load_golden():
    with open(os.path.join(settings.BASE_DIR, 'golden', 'golden.json')) as fh:
        return json.load(fh)


class DeloneTests(SimpleTestCase):

    def test_integer_lattice(self):
        report = delone_report(lattice_points_in_box(Lattice.diagonal(1, 1), 10), 2)
        self.assertAlmostEqual(report.min_separation, 1.0)
        self.assertGreater(report.covering_radius, 0.45)
        self.assertLessEqual(report.covering_radius, 0.5 + 1e-9)
        self.assertLessEqual(report.min_separation, 2 * report.covering_radius + 1e-9)
        self.assertTrue(report.is_symmetric)
        self.assertTrue(report.contains_identity)

    def test_fibonacci_constants(self):
        report = delone_report(model_set_generate(fibonacci_scheme(1.0), 100), 10)
        self.assertAlmostEqual(report.min_separation, 1 / ((1 + 5 ** 0.5) / 2), places=9)
        self.assertLessEqual(report.min_separation, 2 * report.covering_radius + 1e-9)
        self.assertTrue(report.is_symmetric)

    def test_asymmetric_set(self):
        report = delone_report(explicit_pointset([[0.0], [1.0], [3.0]]), 1.0)
        self.assertFalse(report.is_symmetric)
        self.assertTrue(report.contains_identity)

    def test_margin_must_fit(self):
        ps = lattice_points_in_box(Lattice.diagonal(1, 1), 3)
        with self.assertRaises(exceptions.InsufficientTruncation):
            delone_report(ps, 3)

    def test_empty(self):
        with self.assertRaises(exceptions.EmptyPointSet):
            delone_report(explicit_pointset(np.zeros((0, 1)), dim=1), 0.5)


class CoverTests(SimpleTestCase):

    def test_lattice_needs_only_zero(self):
        ps = lattice_points_in_box(Lattice.diagonal(1, 1), 10)
        cover = find_cover_set(sumset_truncated(ps, ps, 5), ps)
        self.assertEqual(cover.k, 1)
        np.testing.assert_array_equal(cover.defect_set, [[0.0, 0.0]])
        self.assertEqual(cover.verified_region_radius, 5.0)

    def test_interval_toy_cover(self):
        base = explicit_pointset([[-1.0], [0.0], [1.0]])
        sumset = explicit_pointset([[float(i)] for i in range(-2, 3)])
        cover = find_cover_set(sumset, base)
        self.assertEqual(cover.k, 3)
        self.assertEqual(cover.defect_set[:, 0].tolist(), [0.0, -1.0, 1.0])
        self.assertTrue(verify_cover(sumset, base, cover.defect_set))
        self.assertEqual(minimal_cover_size(sumset, base), 2)
        self.assertLessEqual(minimal_cover_size(sumset, base), cover.k)

    def test_fibonacci_sumset_cover(self):
        ps = model_set_generate(fibonacci_scheme(1.0), 100)
        square = sumset_truncated(ps, ps, 50)
        cover = find_cover_set(square, ps)
        self.assertLessEqual(cover.k, 3)
        self.assertTrue(verify_cover(square, ps, cover.defect_set, region=cover.verified_region_radius))
        self.assertLessEqual(np.abs(cover.defect_set).max(), cover.candidate_radius + 1e-9)

    def test_verify_rejects_short_defect_set(self):
        ps = model_set_generate(fibonacci_scheme(1.0), 100)
        square = sumset_truncated(ps, ps, 50)
        self.assertFalse(verify_cover(square, ps, [[0.0]], region=40))

    def test_not_closed_with_tiny_candidate_radius(self):
        base = explicit_pointset([[-1.0], [0.0], [1.0]])
        sumset = explicit_pointset([[float(i)] for i in range(-4, 5)])
        with self.assertRaises(exceptions.NotApproximatelyClosed):
            find_cover_set(sumset, base, candidate_radius=0.5)

    def test_fibonacci_minimal_cover_matches_golden(self):
        expected = load_golden()['fibonacci']['sumset_cover']
        ps = model_set_generate(fibonacci_scheme(1.0), expected['base_radius'])
        square = sumset_truncated(ps, ps, expected['sumset_radius'])
        greedy = find_cover_set(square, ps)
        smallest = minimal_cover(square, ps)
        self.assertTrue(smallest.minimal)
        self.assertEqual(smallest.k, expected['minimal_k'])
        self.assertLessEqual(smallest.k, greedy.k)
        self.assertEqual(smallest.verified_region_radius, greedy.verified_region_radius)
        self.assertTrue(verify_cover(square, ps, smallest.defect_set, region=smallest.verified_region_radius))
        self.assertTrue(verify_cover(square, ps, [[f] for f in expected['minimal_defect_set']],
                                     region=smallest.verified_region_radius))
        self.assertFalse(verify_cover(square, ps, [[0.0]], region=smallest.verified_region_radius))

    def test_minimal_cover_of_lattice_is_zero(self):
        ps = lattice_points_in_box(Lattice.diagonal(1, 1), 10)
        cover = minimal_cover(sumset_truncated(ps, ps, 5), ps)
        self.assertTrue(cover.minimal)
        np.testing.assert_array_equal(cover.defect_set, [[0.0, 0.0]])

    def test_interval_minimal_cover_matches_golden(self):
        expected = load_golden()['cover']
        base = explicit_pointset([[float(b)] for b in expected['base']])
        sumset = explicit_pointset([[float(t)] for t in expected['targets']])
        cover = minimal_cover(sumset, base)
        self.assertEqual(cover.k, expected['minimal_k'])
        self.assertTrue(verify_cover(sumset, base, cover.defect_set))

    def test_search_budget(self):
        base = explicit_pointset([[-1.0], [0.0], [1.0]])
        sumset = explicit_pointset([[float(i)] for i in range(-2, 3)])
        cover = minimal_cover(sumset, base, budget=0)
        self.assertFalse(cover.minimal)
        self.assertEqual(cover.k, 3)
        with self.assertRaises(ValueError):
            minimal_cover_size(sumset, base, budget=0)


class ReportTests(SimpleTestCase):

    def test_lattice_is_one_approximate(self):
        report = approximate_lattice_report(lattice_points_in_box(Lattice.diagonal(0.5, 1), 10), 2)
        self.assertTrue(report.is_approximate_lattice)
        self.assertEqual(report.cover.k, 1)
        self.assertEqual(report.sumset_radius, 5.0)
        self.assertEqual(report.minimal_cover.k, 1)
        self.assertTrue(report.minimal_cover.minimal)

    def test_symmetrized_subset_of_lattice(self):
        base = explicit_pointset([[0.25, 0.0], [0.5, 1.0]])
        ps = symmetrize(base, Lattice.diagonal(4, 1), 10)
        report = approximate_lattice_report(ps, 2)
        self.assertTrue(report.is_approximate_lattice)
        self.assertGreaterEqual(report.cover.k, 2)
        self.assertTrue(report.minimal_cover.minimal)
        self.assertLessEqual(report.minimal_cover.k, report.cover.k)

    def test_random_rotated_lattices(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            angle = rng.uniform(0, np.pi)
            rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
            ps = lattice_points_in_box(Lattice(rotation @ np.diag(rng.uniform(0.6, 1.4, 2))), 8)
            report = approximate_lattice_report(ps, 2)
            self.assertEqual(report.cover.k, 1)
