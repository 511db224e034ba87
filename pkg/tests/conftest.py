"""Shared oracles.  They avoid the engine's own linear algebra so that
agreement with it means something."""

import itertools
import math
import os
from fractions import Fraction

from hypothesis import HealthCheck, settings

settings.register_profile("ci", deadline=None, derandomize=True, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


def inverse(m):
    """Inverse of a square integer matrix over Q by Gauss-Jordan."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def det(m):
    m = [[Fraction(x) for x in row] for row in m]
    n, sign, out = len(m), 1, Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        out *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return sign * out


def gcd_all(v):
    return math.gcd(*v)


class SimplicialOracle:
    """Barycentric coordinates on a full dimensional simplicial fan."""

    def __init__(self, rays, cones, boundary=None):
        self.rays = [tuple(r) for r in rays]
        self.cones = [tuple(c) for c in cones]
        self.boundary = [Fraction(b) for b in (boundary or [0] * len(rays))]
        # columns are the rays of the cone
        self.inv = [inverse([[self.rays[i][k] for i in c] for k in range(len(self.rays[0]))])
                    for c in self.cones]

    def locate(self, v):
        """(support, coefficients) of v, or None outside the support."""
        for c, inv in zip(self.cones, self.inv):
            lam = [sum(row[k] * v[k] for k in range(len(v))) for row in inv]
            if all(x >= 0 for x in lam):
                return tuple(i for i, x in zip(c, lam) if x > 0), dict(zip(c, lam))
        return None

    def psi(self, v):
        hit = self.locate(v)
        if hit is None:
            return None
        _, lam = hit
        return sum(x * (1 - self.boundary[i]) for i, x in lam.items())

    def box_mld(self, centers, exact, box):
        """Naive minimum of psi over primitive points of the box."""
        centers = [set(c) for c in centers]
        best = None
        dim = len(self.rays[0])
        for v in itertools.product(range(-box, box + 1), repeat=dim):
            if gcd_all(v) != 1:
                continue
            hit = self.locate(v)
            if hit is None:
                continue
            supp = set(hit[0])
            ok = any(supp == c for c in centers) if exact else any(c <= supp for c in centers)
            if not ok:
                continue
            value = sum(x * (1 - self.boundary[i]) for i, x in hit[1].items())
            if best is None or value < best:
                best = value
        return best
