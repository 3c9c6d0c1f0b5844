"""
The oracle behind golden/golden.json.

Every value here is recomputed by plain enumeration, independently of the
library code paths it is later compared with.
"""
import itertools
import math
import operator
import os
from fractions import Fraction

from django.conf import settings

import quasilat
from quasilat.conf import quasilat_settings
from quasilat.management.base import ReportCommand

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2
GOLDEN_CONJUGATE = (1 - math.sqrt(5)) / 2

# frozen from least-squares runs of the density 2 lattice with a Gaussian window
HAP_RESIDUAL_BOUND = 0.05


def lattice_count(alpha, beta, radius):
    """
    |alpha Z x beta Z ∩ [-R, R]^2| by looping over integer pairs.
    """
    bound_a = int(radius / alpha) + 1
    bound_b = int(radius / beta) + 1
    return sum(1 for i in range(-bound_a, bound_a + 1) for j in range(-bound_b, bound_b + 1)
               if abs(i * alpha) <= radius + 1e-12 and abs(j * beta) <= radius + 1e-12)


def fibonacci_count(window, radius):
    """
    |{a + b tau : |a + b tau| <= R, |a + b tau'| <= w}| by looping over (a, b).
    """
    return len(fibonacci_points(window, radius))


def padic_ball_count(p, w, n):
    """
    Count q in Z[1/p] with |q|_p <= p^n and |q| <= w by testing every
    fraction a / p^n.
    """
    w = Fraction(w)
    den = p ** n
    bound = math.floor(w * den)
    return sum(1 for a in range(-bound, bound + 1) if abs(Fraction(a, den)) <= w)


def minimal_interval_cover(targets, base, candidates, difference=operator.sub):
    """
    Smallest F within candidates with targets ⊆ F + base, by trying every
    subset in order of size.
    """
    base = set(base)
    for size in range(1, len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            if all(any(difference(t, f) in base for f in combo) for t in targets):
                return size, list(combo)
    return None, []


def fibonacci_points(window, radius):
    """
    The pairs (a, b) with |a + b tau| <= R and |a + b tau'| <= w.
    """
    bound_b = int((radius + window) / (GOLDEN_RATIO - GOLDEN_CONJUGATE)) + 2
    bound_a = int(radius + bound_b * GOLDEN_RATIO) + 2
    return [(a, b) for b in range(-bound_b, bound_b + 1) for a in range(-bound_a, bound_a + 1)
            if abs(a + b * GOLDEN_RATIO) <= radius and abs(a + b * GOLDEN_CONJUGATE) <= window]


def fibonacci_sumset_cover(window, radius):
    """
    Smallest cover of the Fibonacci sumset at radius R / 2 by translates of
    the chain at radius R, over candidates of the sumset at radius R / 2.
    Points stay integer pairs (a, b) so membership is exact.
    """
    def value(pair):
        return pair[0] + pair[1] * GOLDEN_RATIO

    base = fibonacci_points(window, radius)
    half = radius / 2.0
    sums = {(a1 + a2, b1 + b2) for a1, b1 in base for a2, b2 in base}
    sumset = sorted((s for s in sums if abs(value(s)) <= half), key=lambda s: (abs(value(s)), value(s)))
    size, cover = minimal_interval_cover(sumset, base, sumset,
                                         difference=lambda t, f: (t[0] - f[0], t[1] - f[1]))
    return size, sorted(value(f) for f in cover)


class Command(ReportCommand):
    help = 'Recompute the reference values by brute force and write golden/golden.json.'

    def report(self, **options):
        lattices = []
        for alpha, beta in [(0.5, 1.0), (1.0, 1.0), (2.0, 0.5)]:
            lattices.append({'alpha': alpha, 'beta': beta, 'density': 1.0 / (alpha * beta),
                             'count_radius_10': lattice_count(alpha, beta, 10.0)})

        fib_radius = 100.0
        fibonacci = {
            'window': 1.0,
            'covolume': math.sqrt(5),
            'density': 2.0 / math.sqrt(5),
            'count_radius_100': fibonacci_count(1.0, fib_radius),
            'empirical_density_radius_100': fibonacci_count(1.0, fib_radius) / (2 * fib_radius),
        }

        padic = []
        for n in range(13):
            count = padic_ball_count(2, 1, n)
            padic.append({'n': n, 'count': count, 'ratio': str(Fraction(count, 2 ** n))})

        fib_k, fib_cover = fibonacci_sumset_cover(1.0, fib_radius)
        fibonacci['sumset_cover'] = {'base_radius': fib_radius, 'sumset_radius': fib_radius / 2,
                                     'minimal_k': fib_k, 'minimal_defect_set': fib_cover}

        size, cover = minimal_interval_cover(range(-2, 3), [-1, 0, 1], [-2, -1, 0, 1, 2])
        spacing = math.sqrt(0.5)
        return {
            'lattices': lattices,
            'fibonacci': fibonacci,
            'padic': {'p': 2, 'w': '1', 'density': 2, 'density_exact': '2', 'balls': padic},
            'cover': {'targets': list(range(-2, 3)), 'base': [-1, 0, 1], 'minimal_k': size,
                      'minimal_defect_set': cover},
            'hap': {'alpha': spacing, 'beta': spacing, 'K': 6.0, 'x_grid': 5, 'x_extent': 0.5,
                    'max_residual_below': HAP_RESIDUAL_BOUND},
            # no timestamp, so an unchanged oracle reproduces the committed file
            'oracle': {'command': 'golden', 'quasilat': quasilat.__version__},
        }

    def emit(self, data, out=None):
        if not out:
            directory = quasilat_settings.GOLDEN_DIR
            if not os.path.isabs(directory):
                directory = os.path.join(settings.BASE_DIR, directory)
            out = os.path.join(directory, 'golden.json')
        super().emit(data, out)
        self.stdout.write(out)
