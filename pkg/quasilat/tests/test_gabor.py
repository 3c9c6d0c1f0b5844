import os
import shutil
import tempfile

import numpy as np
from django.test import SimpleTestCase, override_settings

from quasilat import exceptions
from quasilat.gabor import (GaborSystem, GridSpec, Waveform, biorthogonal_dual, cocycle, coherent_family,
                            completeness_residual, frame_bounds, frame_bounds_sweep, gaussian_window,
                            gram_matrix, hap_residual, hap_table, hermite_basis, hermite_function,
                            hermite_probes, inner, minimality_distances, orthogonality_check, riesz_bounds,
                            tf_shift, uniform_min_delta, window_from_spec)
from quasilat.pointset import Lattice, explicit_pointset, lattice_points_in_box, symmetrize

HALF = 0.5 ** 0.5


class WaveformTests(SimpleTestCase):

    def setUp(self):
        self.grid = GridSpec(8, 0.02)

    def test_grid(self):
        self.assertEqual(self.grid.L, 801)
        self.assertAlmostEqual(self.grid.t[0], -8.0)
        self.assertAlmostEqual(self.grid.t[400], 0.0)
        self.assertAlmostEqual(self.grid.xi_max, 12.5)
        self.assertEqual(self.grid.shift_range, 4.0)
        with self.assertRaises(ValueError):
            GridSpec(0.01, 0.01)

    def test_gaussian_has_unit_norm(self):
        self.assertAlmostEqual(gaussian_window(self.grid).norm(), 1.0, delta=1e-10)
        self.assertAlmostEqual(gaussian_window(GridSpec(12, 0.005)).norm(), 1.0, delta=1e-10)

    def test_hermite_functions_are_orthonormal(self):
        h = hermite_basis(self.grid, 10)
        gram = (h * self.grid.weights[None, :]) @ h.T
        np.testing.assert_allclose(gram, np.eye(10), atol=1e-8)
        np.testing.assert_allclose(h[0], gaussian_window(self.grid).samples.real, atol=1e-12)

    def test_tf_shift_is_unitary(self):
        g = gaussian_window(self.grid)
        moved = tf_shift(g, 1.0, 2.5)
        self.assertAlmostEqual(moved.norm(), 1.0, places=8)
        self.assertAlmostEqual(abs(inner(moved, g)), np.exp(-np.pi * (1.0 + 6.25) / 2), places=8)

    def test_off_grid_shift_uses_interpolation(self):
        g = gaussian_window(self.grid)
        moved = tf_shift(g, 0.013, 0.0)
        expected = 2 ** 0.25 * np.exp(-np.pi * (self.grid.t - 0.013) ** 2)
        np.testing.assert_allclose(moved.samples.real, expected, atol=1e-6)

    def test_cocycle(self):
        grid = GridSpec(8, 0.01)
        g = gaussian_window(grid)
        rng = np.random.default_rng(11)
        for _ in range(100):
            m, m_prime = rng.integers(-100, 101, size=2)
            x, x_prime = grid.dt * m, grid.dt * m_prime
            xi, xi_prime = rng.uniform(-3, 3, size=2)
            lhs = tf_shift(tf_shift(g, x_prime, xi_prime), x, xi)
            rhs = tf_shift(g, x + x_prime, xi + xi_prime)
            c = cocycle((x, xi), (x_prime, xi_prime))
            self.assertAlmostEqual(abs(c), 1.0)
            np.testing.assert_allclose(lhs.samples, c * rhs.samples, atol=1e-6)

    def test_orthogonality_relation(self):
        g = gaussian_window(self.grid)
        self.assertAlmostEqual(orthogonality_check(g, g, 0.1, 4.0), 1.0, delta=0.01)
        h1 = hermite_function(self.grid, 1)
        self.assertAlmostEqual(orthogonality_check(g, h1, 0.1, 4.0), 1.0, delta=0.01)
        with self.assertRaises(exceptions.ShiftOutOfRange):
            orthogonality_check(g, g, 0.1, 5.0)

    def test_shift_out_of_range(self):
        with self.assertRaises(exceptions.ShiftOutOfRange):
            coherent_family(gaussian_window(self.grid), [[20.0, 0.0]])
        with self.assertRaises(exceptions.ShiftOutOfRange):
            coherent_family(gaussian_window(self.grid), [[0.0, 13.0]])

    def test_window_from_spec(self):
        g = window_from_spec(self.grid, 'gaussian')
        np.testing.assert_array_equal(g.samples, gaussian_window(self.grid).samples)
        h2 = window_from_spec(self.grid, 'hermite:2')
        np.testing.assert_array_equal(h2.samples, hermite_function(self.grid, 2).samples)

    def test_window_from_csv(self):
        tmp = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, tmp)
        path = os.path.join(tmp, 'window.csv')
        t = np.linspace(-8, 8, 401)
        np.savetxt(path, np.column_stack([t, 2 ** 0.25 * np.exp(-np.pi * t ** 2)]), delimiter=',')
        w = window_from_spec(self.grid, path)
        np.testing.assert_allclose(w.samples, gaussian_window(self.grid).samples, atol=1e-4)

        with open(path, 'w') as fh:
            fh.write('0,1\n1,0\n')
        with self.assertRaises(exceptions.MalformedWaveform):
            window_from_spec(self.grid, path)

    def test_sample_count_is_checked(self):
        with self.assertRaises(exceptions.MalformedWaveform):
            Waveform(self.grid, np.zeros(10))


class FrameTests(SimpleTestCase):

    def setUp(self):
        self.grid = GridSpec(24, 0.02)
        self.g = gaussian_window(self.grid)

    def test_oversampled_lattice_is_a_frame(self):
        sys = GaborSystem(self.g, lattice_points_in_box(Lattice.diagonal(HALF, HALF), 12))
        sweep = frame_bounds_sweep(sys, [20, 30, 40])
        self.assertEqual([b.subspace_dim for b in sweep], [20, 30, 40])
        for earlier, later in zip(sweep, sweep[1:]):
            self.assertLessEqual(later.A_est, earlier.A_est + 1e-10)
            self.assertGreaterEqual(later.B_est, earlier.B_est - 1e-10)
        self.assertGreater(sweep[-1].A_est, 0.1)
        self.assertGreaterEqual(sweep[-1].B_est, sweep[-1].A_est)
        self.assertEqual(frame_bounds(sys, 40).A_est, sweep[-1].A_est)

    def test_removing_a_point_never_raises_the_lower_bound(self):
        full = lattice_points_in_box(Lattice.diagonal(HALF, HALF), 12)
        for removed in ([0.0, 0.0], [HALF, -HALF], [3 * HALF, 2 * HALF]):
            keep = np.any(np.abs(full.points - removed) > 1e-9, axis=1)
            self.assertEqual(int((~keep).sum()), 1)
            thinned = explicit_pointset(full.points[keep], truncation_radius=12)
            before = frame_bounds(GaborSystem(self.g, full), 30)
            after = frame_bounds(GaborSystem(self.g, thinned), 30)
            self.assertLessEqual(after.A_est, before.A_est + 1e-10)
            self.assertLessEqual(after.B_est, before.B_est + 1e-10)

    def test_sparse_lattice_is_not_a_frame(self):
        sys = GaborSystem(self.g, lattice_points_in_box(Lattice.diagonal(2, 2), 12))
        self.assertLess(frame_bounds(sys, 60).A_est, 1e-6)

    def test_sub_critical_lattice_lower_bound_collapses(self):
        side = 1.05 ** 0.5
        sys = GaborSystem(gaussian_window(GridSpec(30, 0.02)),
                          lattice_points_in_box(Lattice.diagonal(side, side), 12))
        sweep = frame_bounds_sweep(sys, range(50, 101, 10))
        a = [b.A_est for b in sweep]
        for earlier, later in zip(a, a[1:]):
            self.assertLessEqual(later, earlier + 1e-10)
        self.assertGreater(a[0], 0.01)
        self.assertLess(a[-1], 0.005)
        self.assertLess(a[-1], a[0] / 4)

    def test_truncation_too_small(self):
        sys = GaborSystem(self.g, lattice_points_in_box(Lattice.diagonal(HALF, HALF), 5))
        with self.assertRaises(exceptions.TruncationTooSmall):
            frame_bounds(sys, 40)

    def test_needs_time_frequency_points(self):
        with self.assertRaises(exceptions.MalformedPointSet):
            GaborSystem(self.g, explicit_pointset([[0.0], [1.0]]))

    @override_settings(QUASILAT={'MAX_POINTS': 10})
    def test_family_too_large(self):
        sys = GaborSystem(self.g, lattice_points_in_box(Lattice.diagonal(1, 1), 3))
        with self.assertRaises(exceptions.FamilyTooLarge):
            gram_matrix(sys)


class RieszTests(SimpleTestCase):

    def setUp(self):
        self.grid = GridSpec(20, 0.025)
        self.sys = GaborSystem(gaussian_window(self.grid), lattice_points_in_box(Lattice.diagonal(2, 1), 8))

    def test_riesz_bounds(self):
        bounds = riesz_bounds(self.sys, margin=1)
        self.assertEqual(bounds.n_points, 7 * 15)
        self.assertGreater(bounds.A_est, 0.5)
        self.assertLess(bounds.B_est, 1.5)

    def test_biorthogonal_dual(self):
        dual = biorthogonal_dual(self.sys, margin=4)
        self.assertLess(dual.residual, 1e-6)
        self.assertEqual(dual.duals.shape, (len(self.sys.points), self.grid.L))
        self.assertGreaterEqual(dual.norm_sup, dual.interior_norm_sup)
        delta = uniform_min_delta(self.sys, margin=4)
        self.assertAlmostEqual(delta * dual.interior_norm_sup, 1.0, places=6)

    def test_single_point_is_orthonormal(self):
        sys = GaborSystem(gaussian_window(self.grid), explicit_pointset([[0.0, 0.0]]))
        bounds = riesz_bounds(sys)
        self.assertAlmostEqual(bounds.A_est, 1.0, places=8)
        self.assertAlmostEqual(bounds.B_est, 1.0, places=8)
        self.assertAlmostEqual(uniform_min_delta(sys), 1.0, places=8)

    def test_repeated_point_has_no_lower_bound(self):
        sys = GaborSystem(gaussian_window(self.grid), explicit_pointset([[0.0, 0.0]]))
        eigenvalues = np.linalg.eigvalsh(gram_matrix(sys, [[0.0, 0.0], [0.0, 0.0]]))
        self.assertLess(abs(eigenvalues[0]), 1e-10)
        self.assertAlmostEqual(eigenvalues[-1], 2.0, places=8)
        near = GaborSystem(gaussian_window(self.grid), explicit_pointset([[0.0, 0.0], [0.0, 1e-6]]))
        self.assertLess(riesz_bounds(near).A_est, 1e-6)

    def test_widely_spaced_family_is_orthonormal(self):
        points = [[4.0 * k, 4.0 * m] for k in (-1, 0, 1) for m in (-1, 0, 1)]
        sys = GaborSystem(gaussian_window(self.grid), explicit_pointset(points))
        bounds = riesz_bounds(sys)
        self.assertEqual(bounds.n_points, 9)
        self.assertAlmostEqual(bounds.A_est, 1.0, places=8)
        self.assertAlmostEqual(bounds.B_est, 1.0, places=8)
        np.testing.assert_allclose(minimality_distances(sys), 1.0, atol=1e-8)
        self.assertAlmostEqual(uniform_min_delta(sys), 1.0, places=8)

    def test_gram_is_hermitian_with_unit_diagonal(self):
        gram = gram_matrix(self.sys, self.sys.points.within(3))
        np.testing.assert_allclose(gram, gram.conj().T, atol=1e-12)
        np.testing.assert_allclose(gram.diagonal().real, 1.0, atol=1e-8)

    def test_nearly_repeated_point_is_not_minimal(self):
        sys = GaborSystem(gaussian_window(self.grid), explicit_pointset([[0.0, 0.0], [0.0, 1e-6]]))
        with self.assertRaises(exceptions.NotMinimal):
            biorthogonal_dual(sys)
        self.assertLess(minimality_distances(sys).max(), 1e-4)
        self.assertLess(uniform_min_delta(sys), 1e-4)


class ApproximationTests(SimpleTestCase):

    def setUp(self):
        self.grid = GridSpec(24, 0.02)
        self.g = gaussian_window(self.grid)
        self.dense = GaborSystem(self.g, lattice_points_in_box(Lattice.diagonal(HALF, HALF), 12))

    def test_hap_on_lattice_point(self):
        self.assertLess(hap_residual(self.dense, self.g, [0.0, 0.0], 3), 1e-8)

    def test_hap_residuals_shrink_with_K(self):
        centers = [(x, y) for x in np.linspace(-0.5, 0.5, 5) for y in np.linspace(-0.5, 0.5, 5)]
        rows = hap_table(self.dense, self.g, centers, [6, 3])
        self.assertEqual(len(rows), 50)
        self.assertEqual([r['K'] for r in rows[:4]], [3.0, 6.0, 3.0, 6.0])
        for small, large in zip(rows[::2], rows[1::2]):
            self.assertEqual(small['x'], large['x'])
            self.assertLessEqual(large['residual'], small['residual'] + 1e-8)
        self.assertLess(max(r['residual'] for r in rows if r['K'] == 6.0), 0.05)

    def test_hap_needs_room(self):
        with self.assertRaises(exceptions.InsufficientTruncation):
            hap_residual(self.dense, self.g, [10.0, 0.0], 6)

    def test_dense_family_reproduces_probes(self):
        probes = hermite_probes(self.grid, 5)
        self.assertLess(completeness_residual(self.dense, probes, family_radius=10), 1e-3)
        self.assertEqual(completeness_residual(self.dense, []), 0.0)

    def test_single_gaussian_misses_first_hermite_function(self):
        sys = GaborSystem(self.g, explicit_pointset([[0.0, 0.0]]))
        self.assertAlmostEqual(completeness_residual(sys, [hermite_function(self.grid, 1)]), 1.0, places=8)
        self.assertLess(completeness_residual(sys, [self.g]), 1e-8)

    def test_sparse_family_misses_probes(self):
        sparse = symmetrize(explicit_pointset([[0.25, 0.0]]), Lattice.diagonal(4, 1), 10)
        sys = GaborSystem(self.g, sparse)
        self.assertGreater(completeness_residual(sys, hermite_probes(self.grid, 10)), 1e-3)
