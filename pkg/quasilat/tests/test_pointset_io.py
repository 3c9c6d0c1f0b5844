import json
import os
import shutil
import tempfile

import numpy as np
from django.test import SimpleTestCase

from quasilat import exceptions
from quasilat.pointset import Lattice, explicit_pointset, fibonacci_scheme, lattice_points_in_box, model_set_generate
from quasilat.pointset_io import read_csv, sidecar_path, write_csv


class PointSetFileTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.tmp)

    def path(self, name):
        return os.path.join(self.tmp, name)

    def test_header_and_sidecar(self):
        ps = model_set_generate(fibonacci_scheme(1.0), 100)
        sidecar = write_csv(ps, self.path('fib.csv'))
        self.assertEqual(sidecar, self.path('fib.json'))
        with open(self.path('fib.csv')) as fh:
            self.assertEqual(fh.readline().strip(), 'dim=1')
        with open(sidecar) as fh:
            meta = json.load(fh)
        self.assertEqual(meta['dim'], 1)
        self.assertEqual(meta['n_points'], len(ps))
        self.assertEqual(meta['source']['kind'], 'model_set')

    def test_round_trip(self):
        ps = lattice_points_in_box(Lattice([[0.7, 0.2], [0.1, 1.3]]), 6)
        write_csv(ps, self.path('a.csv'))
        again = read_csv(self.path('a.csv'))
        np.testing.assert_array_equal(again.points, ps.points)
        self.assertEqual(again.truncation_radius, ps.truncation_radius)
        self.assertEqual(again.source, ps.source)
        write_csv(again, self.path('b.csv'))
        with open(self.path('a.csv')) as a, open(self.path('b.csv')) as b:
            self.assertEqual(a.read(), b.read())

    def test_without_sidecar_reads_explicit(self):
        with open(self.path('plain.csv'), 'w') as fh:
            fh.write('dim=2\n0,0\n1,-0.5\n')
        ps = read_csv(self.path('plain.csv'))
        self.assertEqual(ps.kind, 'explicit')
        self.assertTrue(ps.exhaustive)
        self.assertEqual(len(ps), 2)

    def test_empty_explicit_set(self):
        ps = explicit_pointset(np.zeros((0, 2)), dim=2)
        write_csv(ps, self.path('empty.csv'))
        self.assertEqual(len(read_csv(self.path('empty.csv'))), 0)

    def test_missing_header(self):
        with open(self.path('bad.csv'), 'w') as fh:
            fh.write('0,0\n1,1\n')
        with self.assertRaises(exceptions.MalformedPointSet):
            read_csv(self.path('bad.csv'))

    def test_wrong_column_count(self):
        with open(self.path('bad.csv'), 'w') as fh:
            fh.write('dim=2\n0,0,0\n')
        with self.assertRaises(exceptions.MalformedPointSet):
            read_csv(self.path('bad.csv'))

    def test_non_numeric(self):
        with open(self.path('bad.csv'), 'w') as fh:
            fh.write('dim=1\nabc\n')
        with self.assertRaises(exceptions.MalformedPointSet):
            read_csv(self.path('bad.csv'))

    def test_bad_sidecar(self):
        with open(self.path('p.csv'), 'w') as fh:
            fh.write('dim=1\n0\n')
        with open(sidecar_path(self.path('p.csv')), 'w') as fh:
            fh.write('{"dim": 1, "truncation_radius": -1, "source": {}}')
        with self.assertRaises(exceptions.MalformedPointSet):
            read_csv(self.path('p.csv'))

    def test_missing_file(self):
        with self.assertRaises(exceptions.MalformedPointSet):
            read_csv(self.path('nothing.csv'))
