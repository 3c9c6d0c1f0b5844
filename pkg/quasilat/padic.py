"""
The model set { q in Z[1/p] : |q| <= w } viewed inside Q_p, with Haar
measure normalized by mu(Z_p) = 1 so the ball p^-n Z_p has measure p^n.

All membership tests and counts use integers and Fractions only.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List

import numpy as np

from . import exceptions

logger = logging.getLogger(__name__)


def is_prime(n):
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


def as_fraction(value):
    """
    Exact rational from an int, Fraction or decimal string; floats are read
    through their shortest repr, so 0.1 becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError('not a number: %r' % (value,))
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


def valuation(a, p):
    """
    v_p(a) for a non-zero integer a.
    """
    if a == 0:
        raise ValueError('the valuation of 0 is infinite')
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


@dataclass(frozen=True)
class PAdicRational:
    """
    a / p^k, kept canonical: k = 0 or p does not divide a (and 0 is 0/p^0).
    """
    a: int
    k: int
    p: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError('k must be non-negative')
        a, k = int(self.a), int(self.k)
        if a == 0:
            k = 0
        while k > 0 and a % self.p == 0:
            a //= self.p
            k -= 1
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'k', k)

    @classmethod
    def from_fraction(cls, q, p):
        q = as_fraction(q)
        k = 0
        den = q.denominator
        while den % p == 0:
            den //= p
            k += 1
        if den != 1:
            raise ValueError('%s is not in Z[1/%d]' % (q, p))
        return cls(q.numerator, k, p)

    @property
    def value(self):
        return Fraction(self.a, self.p ** self.k)

    @property
    def valuation(self):
        return valuation(self.a, self.p) - self.k

    def __float__(self):
        return float(self.value)

    def __neg__(self):
        return PAdicRational(-self.a, self.k, self.p)

    def __add__(self, other):
        return PAdicRational.from_fraction(self.value + other.value, self.p)

    def __sub__(self, other):
        return PAdicRational.from_fraction(self.value - other.value, self.p)

    def __str__(self):
        return str(self.a) if self.k == 0 else '%d/%d^%d' % (self.a, self.p, self.k)


def padic_norm(q):
    """
    |q|_p = p^(-v_p(q)), exact; |0|_p = 0.
    """
    if q.a == 0:
        return Fraction(0)
    return Fraction(q.p) ** (-q.valuation)


def ball_count(p, w, n):
    """
    |Lambda ∩ p^-n Z_p| = 2 floor(w p^n) + 1.
    """
    return 2 * math.floor(as_fraction(w) * p ** n) + 1


def enumerate_model_set(p, w, n):
    """
    Every a/p^k with 0 <= k <= n and |a/p^k| <= w, canonical, ordered by
    (k, a).
    """
    if n < 0:
        raise ValueError('n must be non-negative')
    w = as_fraction(w)
    out = []
    for k in range(n + 1):
        bound = math.floor(w * p ** k)
        for a in range(-bound, bound + 1):
            if k == 0 or a % p:
                out.append(PAdicRational(a, k, p))
    return out


@dataclass(frozen=True)
class PAdicModelSet:
    p: int
    w: Fraction
    n_max: int

    def __post_init__(self):
        if not is_prime(int(self.p)):
            raise ValueError('%r is not prime' % (self.p,))
        w = as_fraction(self.w)
        if not w > 0:
            raise exceptions.InvalidWindow(half_widths=[str(w)])
        if self.n_max < 0:
            raise ValueError('n_max must be non-negative')
        object.__setattr__(self, 'w', w)

    def elements(self, n=None):
        return enumerate_model_set(self.p, self.w, self.n_max if n is None else n)

    def contains(self, q):
        return abs(q.value) <= self.w and q.k <= self.n_max


def translate_count(p, w, n, x):
    """
    |Lambda ∩ (x + p^-n Z_p)| for x in Z[1/p]: the a with |x + a/p^n| <= w.
    """
    w = as_fraction(w)
    x = as_fraction(x)
    scale = p ** n
    hi = math.floor((w - x) * scale)
    lo = math.ceil((-w - x) * scale)
    return max(hi - lo + 1, 0)


def translate_counts(p, w, n, depth):
    """
    Counts over the coset representatives j / p^(n + depth) of p^-n Z_p.
    """
    den = p ** (n + depth)
    return [translate_count(p, w, n, Fraction(j, den)) for j in range(p ** depth)]


@dataclass(frozen=True)
class PAdicDensityReport:
    p: int
    w: str
    n_values: List[int]
    counts: List[int]
    measures: List[int]
    ratios: List[float]
    exact_ratios: List[str]
    lower_estimates: List[float]
    upper_estimates: List[float]
    density: float
    density_exact: str
    D_minus: float
    D_plus: float
    translate_depth: int


def _extrapolate(p, ratios):
    """
    Remove a p^-n error term: (p r_n - r_(n-1)) / (p - 1).
    """
    if len(ratios) < 2:
        return ratios[-1]
    return (p * ratios[-1] - ratios[-2]) / (p - 1)


def padic_density(ms, translate_depth=2):
    """
    Per-n ratios count(Lambda ∩ p^-n Z_p) / p^n, lower and upper ratios over
    translates of the ball, and the extrapolated density (2w in the limit).
    """
    n_values = list(range(ms.n_max + 1))
    counts, measures, ratios, lower, upper = [], [], [], [], []
    for n in n_values:
        measure = ms.p ** n
        count = ball_count(ms.p, ms.w, n)
        counts.append(count)
        measures.append(measure)
        ratios.append(Fraction(count, measure))
        around = translate_counts(ms.p, ms.w, n, translate_depth)
        lower.append(Fraction(min(around), measure))
        upper.append(Fraction(max(around), measure))
    density = _extrapolate(ms.p, ratios)
    logger.debug('p-adic density p=%d w=%s: %s', ms.p, ms.w, density)
    return PAdicDensityReport(
        p=ms.p,
        w=str(ms.w),
        n_values=n_values,
        counts=counts,
        measures=measures,
        ratios=[float(r) for r in ratios],
        exact_ratios=[str(r) for r in ratios],
        lower_estimates=[float(r) for r in lower],
        upper_estimates=[float(r) for r in upper],
        density=float(density),
        density_exact=str(density),
        D_minus=float(lower[-1]),
        D_plus=float(upper[-1]),
        translate_depth=translate_depth,
    )


@dataclass(frozen=True)
class PAdicCoverResult:
    defect_set: List[PAdicRational]
    k: int
    depth: int
    candidate_radius: Fraction
    verified: bool


def padic_cover_set(ms, candidate_radius=None):
    """
    Cover the real parts of Lambda + Lambda, which fill [-2w, 2w] at depth
    n_max, by translates f + [-w, w] with f drawn from Lambda + Lambda.
    Works in units of p^-n_max; greedy with the candidate nearest the origin
    (then the smallest) winning ties.
    """
    n = ms.n_max
    scale = ms.p ** n
    half = math.floor(ms.w * scale)
    candidate_radius = 2 * ms.w if candidate_radius is None else as_fraction(candidate_radius)
    reach = min(math.floor(candidate_radius * scale), 2 * half)

    sums = np.arange(-2 * half, 2 * half + 1)
    candidates = np.arange(-reach, reach + 1)
    candidates = candidates[np.lexsort((candidates, np.abs(candidates)))]
    uncovered = np.ones(len(sums), dtype=bool)
    chosen = []
    while uncovered.any():
        prefix = np.concatenate([[0], np.cumsum(uncovered)])
        lo = np.clip(candidates - half + 2 * half, 0, len(sums))
        hi = np.clip(candidates + half + 2 * half + 1, 0, len(sums))
        gains = prefix[hi] - prefix[lo]
        best = int(np.argmax(gains))
        if gains[best] == 0:
            raise exceptions.NotApproximatelyClosed(
                uncovered=int(uncovered.sum()), candidate_radius=str(candidate_radius))
        f = int(candidates[best])
        chosen.append(f)
        uncovered[max(f - half + 2 * half, 0):min(f + half + 2 * half + 1, len(sums))] = False

    verified = all(any(abs(int(s) - f) <= half for f in chosen) for s in sums)
    return PAdicCoverResult(
        defect_set=[PAdicRational(f, n, ms.p) for f in chosen],
        k=len(chosen),
        depth=n,
        candidate_radius=candidate_radius,
        verified=verified,
    )
