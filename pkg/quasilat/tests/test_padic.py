from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from quasilat import exceptions
from quasilat.padic import (PAdicModelSet, PAdicRational, as_fraction, ball_count, enumerate_model_set,
                            padic_cover_set, padic_density, padic_norm, translate_count, translate_counts)


class PAdicRationalTests(SimpleTestCase):

    def test_canonical_form(self):
        q = PAdicRational(12, 0, 2)
        self.assertEqual((q.a, q.k), (12, 0))
        q = PAdicRational(12, 2, 2)
        self.assertEqual((q.a, q.k), (3, 0))
        q = PAdicRational(6, 3, 2)
        self.assertEqual((q.a, q.k), (3, 2))
        q = PAdicRational(0, 5, 3)
        self.assertEqual((q.a, q.k), (0, 0))
        self.assertEqual(PAdicRational(6, 3, 2), PAdicRational(3, 2, 2))

    def test_from_fraction(self):
        q = PAdicRational.from_fraction('3/8', 2)
        self.assertEqual((q.a, q.k), (3, 3))
        self.assertEqual(q.value, Fraction(3, 8))
        self.assertEqual(str(q), '3/2^3')
        with self.assertRaises(ValueError):
            PAdicRational.from_fraction('1/3', 2)

    def test_decimal_strings_are_exact(self):
        self.assertEqual(as_fraction(0.1), Fraction(1, 10))
        self.assertEqual(as_fraction('0.75'), Fraction(3, 4))
        with self.assertRaises(TypeError):
            as_fraction(True)

    def test_arithmetic(self):
        half = PAdicRational(1, 1, 2)
        self.assertEqual(half + half, PAdicRational(1, 0, 2))
        self.assertEqual(half - half, PAdicRational(0, 0, 2))
        self.assertEqual(-half, PAdicRational(-1, 1, 2))

    def test_norm(self):
        self.assertEqual(padic_norm(PAdicRational(12, 0, 2)), Fraction(1, 4))
        self.assertEqual(padic_norm(PAdicRational(3, 2, 2)), 4)
        self.assertEqual(padic_norm(PAdicRational(9, 0, 3)), Fraction(1, 9))
        self.assertEqual(padic_norm(PAdicRational(0, 0, 5)), 0)

    def test_ultrametric_inequality(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            x = PAdicRational(int(rng.integers(-500, 500)), int(rng.integers(0, 6)), 3)
            y = PAdicRational(int(rng.integers(-500, 500)), int(rng.integers(0, 6)), 3)
            self.assertLessEqual(padic_norm(x + y), max(padic_norm(x), padic_norm(y)))


class ModelSetTests(SimpleTestCase):

    def test_enumeration_matches_ball_count(self):
        for p, w in [(2, 1), (3, '0.7'), (5, '2/3')]:
            for n in range(5):
                elements = enumerate_model_set(p, w, n)
                self.assertEqual(len(elements), ball_count(p, w, n))
                self.assertEqual(len({e.value for e in elements}), len(elements))
                self.assertTrue(all(abs(e.value) <= as_fraction(w) for e in elements))

    def test_small_enumeration(self):
        values = [e.value for e in enumerate_model_set(2, 1, 2)]
        self.assertEqual(values, [-1, 0, 1, Fraction(-1, 2), Fraction(1, 2),
                                  Fraction(-3, 4), Fraction(-1, 4), Fraction(1, 4), Fraction(3, 4)])

    def test_validation(self):
        with self.assertRaises(ValueError):
            PAdicModelSet(4, 1, 3)
        with self.assertRaises(exceptions.InvalidWindow):
            PAdicModelSet(2, 0, 3)
        with self.assertRaises(ValueError):
            PAdicModelSet(2, 1, -1)

    def test_contains(self):
        ms = PAdicModelSet(2, '1', 3)
        self.assertTrue(ms.contains(PAdicRational(7, 3, 2)))
        self.assertFalse(ms.contains(PAdicRational(9, 3, 2)))
        self.assertFalse(ms.contains(PAdicRational(1, 4, 2)))

    def test_translate_count(self):
        self.assertEqual(translate_count(2, 1, 3, 0), ball_count(2, 1, 3))
        self.assertEqual(translate_count(2, 1, 2, Fraction(1, 8)), 8)
        brute = sum(1 for a in range(-100, 100) if abs(Fraction(1, 8) + Fraction(a, 4)) <= 1)
        self.assertEqual(brute, 8)
        self.assertEqual(len(translate_counts(2, 1, 3, 2)), 4)


class DensityTests(SimpleTestCase):

    def test_binary_unit_window(self):
        report = padic_density(PAdicModelSet(2, 1, 12))
        self.assertEqual(report.counts[-1], 8193)
        self.assertEqual(report.measures[-1], 4096)
        self.assertEqual(report.exact_ratios[-1], str(Fraction(2) + Fraction(1, 4096)))
        self.assertEqual(report.exact_ratios[3], '17/8')
        self.assertEqual(report.density_exact, '2')
        self.assertEqual(report.density, 2.0)
        self.assertLessEqual(report.D_minus, report.density)
        self.assertGreaterEqual(report.D_plus, report.density)

    def test_ratios_approach_twice_the_window(self):
        report = padic_density(PAdicModelSet(3, '0.7', 10))
        errors = [abs(r - 1.4) for r in report.ratios]
        self.assertLess(errors[-1], 1e-4)
        self.assertAlmostEqual(report.density, 1.4, places=4)

    def test_odd_prime_half_window_is_exact(self):
        report = padic_density(PAdicModelSet(3, '1/2', 6))
        self.assertEqual(set(report.exact_ratios), {'1'})
        self.assertEqual(report.density_exact, '1')


class CoverTests(SimpleTestCase):

    def test_binary_unit_window(self):
        cover = padic_cover_set(PAdicModelSet(2, 1, 12))
        self.assertEqual(cover.k, 3)
        self.assertEqual([str(f) for f in cover.defect_set], ['0', '-1', '1'])
        self.assertTrue(cover.verified)
        self.assertEqual(cover.depth, 12)

    def test_small_candidate_radius(self):
        with self.assertRaises(exceptions.NotApproximatelyClosed):
            padic_cover_set(PAdicModelSet(2, 100, 0), candidate_radius=2)
