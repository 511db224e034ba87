"""Log pairs (X, B) on a fan: piecewise-linear functions and log discrepancies.

Conventions
-----------
A torus invariant divisor ``sum a_i D_i`` is stored as the tuple of its
coefficients, aligned with ``fan.rays``, and is encoded by the piecewise
linear function taking the value ``a_i`` at ray ``v_i``.  The canonical
divisor is ``K = -sum D_i``.  The log discrepancy function of a pair is the
piecewise linear function of ``-(K + B)``, i.e. value ``1 - b_i`` at ``v_i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import lattice as lat
from .errors import NotLogCanonical, NotPrimitive, NotRCartier, OutsideSupport, UnknownCone
from .fan import Cone, Fan, make_cone, pulling_triangulation


def divisor(values: Iterable) -> tuple:
    """Normalize ray coefficients to a tuple of Fractions."""
    return tuple(lat.parse_rational(x) for x in values)


def canonical_divisor(fan: Fan) -> tuple:
    return (Fraction(-1),) * len(fan.rays)


def zero_divisor(fan: Fan) -> tuple:
    return (Fraction(0),) * len(fan.rays)


def add_divisors(a: Sequence, b: Sequence) -> tuple:
    return tuple(Fraction(x) + Fraction(y) for x, y in zip(a, b))


def scale_divisor(k, a: Sequence) -> tuple:
    return tuple(Fraction(k) * Fraction(x) for x in a)


class PLFunction:
    """A function on |fan| that is linear on every maximal cone.

    ``functionals[i]`` is a rational linear form (an element of M tensor Q)
    representing the function on maximal cone ``i``.
    """

    def __init__(self, fan: Fan, functionals: Sequence[Sequence[Fraction]], values: Sequence):
        self.fan = fan
        self.functionals = tuple(tuple(m) for m in functionals)
        self.values = tuple(values)

    def __repr__(self):
        return f"PLFunction({[list(map(str, m)) for m in self.functionals]})"

    @cached_property
    def _integral(self) -> tuple:
        out = []
        for m in self.functionals:
            den = math.lcm(*(Fraction(x).denominator for x in m)) if m else 1
            out.append((tuple(int(x * den) for x in m), den))
        return tuple(out)

    def on_cone(self, index: int, v: Sequence[int]) -> Fraction:
        m, den = self._integral[index]
        return Fraction(sum(a * b for a, b in zip(m, v)), den)

    def cone_index_of(self, v: Sequence[int]) -> int:
        for i, c in enumerate(self.fan.cones):
            facets, eqs = self.fan.description(c)
            if all(lat.dot(u, v) >= 0 for u in facets) and not any(lat.dot(e, v) for e in eqs):
                return i
        raise OutsideSupport(f"{tuple(v)} is outside the support", vector=tuple(v))

    def __call__(self, v: Sequence[int]) -> Fraction:
        return self.on_cone(self.cone_index_of(v), v)

    def is_linear(self) -> bool:
        """True iff a single global linear form reproduces every ray value."""
        return global_functional(self.fan, self.values) is not None


def global_functional(fan: Fan, values: Sequence, rays: Iterable[int] | None = None):
    """A rational m with <m, v_i> = values[i] on the chosen rays, or None."""
    idx = list(range(len(fan.rays))) if rays is None else list(rays)
    if not idx:
        return (Fraction(0),) * fan.dim
    return lat.solve_rational([fan.rays[i] for i in idx], [Fraction(values[i]) for i in idx])


def pl_function(fan: Fan, values: Sequence) -> PLFunction:
    """Piecewise linear function interpolating ``values`` at the rays.

    Raises NotRCartier when a non-simplicial cone admits no interpolating
    linear form.
    """
    values = divisor(values)
    if len(values) != len(fan.rays):
        raise ValueError("one value per ray expected")
    functionals = []
    for c in fan.cones:
        m = global_functional(fan, values, c)
        if m is None:
            raise NotRCartier(f"divisor is not R-Cartier on cone {c}", cone=c)
        functionals.append(m)
    return PLFunction(fan, functionals, values)


def is_r_cartier(fan: Fan, values: Sequence) -> bool:
    try:
        pl_function(fan, values)
    except NotRCartier:
        return False
    return True


@dataclass(frozen=True)
class ToricPair:
    """A toric variety together with an invariant boundary ``B = sum b_i D_i``."""

    fan: Fan
    boundary: tuple

    def __init__(self, fan: Fan, boundary: Sequence | None = None):
        if boundary is None:
            boundary = zero_divisor(fan)
        boundary = divisor(boundary)
        if len(boundary) != len(fan.rays):
            raise ValueError("one boundary coefficient per ray expected")
        object.__setattr__(self, "fan", fan)
        object.__setattr__(self, "boundary", boundary)

    @property
    def is_boundary(self) -> bool:
        return all(0 <= b <= 1 for b in self.boundary)

    @property
    def k_plus_b(self) -> tuple:
        return tuple(b - 1 for b in self.boundary)

    @cached_property
    def psi(self) -> PLFunction:
        """Log discrepancy function: the PL function of -(K+B)."""
        return pl_function(self.fan, [1 - b for b in self.boundary])

    @property
    def is_log_canonical(self) -> bool:
        # psi is linear on each cone, so nonnegativity at the rays suffices
        try:
            self.psi
        except NotRCartier:
            return False
        return all(b <= 1 for b in self.boundary)

    @property
    def is_klt(self) -> bool:
        return self.is_log_canonical and all(b < 1 for b in self.boundary)


def log_discrepancy(pair: ToricPair, v: Sequence[int]) -> Fraction:
    """Log discrepancy of (X, B) at the toric valuation of a primitive vector."""
    v = tuple(v)
    if not lat.is_primitive(v):
        raise NotPrimitive(f"{v} is not primitive", vector=v)
    return pair.psi(v)


def codim(fan: Fan, cone: Iterable[int]) -> int:
    """Codimension of the orbit closure V(cone), i.e. the dimension of the cone."""
    cone = make_cone(cone)
    return fan.cone_dim(cone)


# ---------------------------------------------------------------------------
# Minimal log discrepancies


def _admissible(centers: list, exact: bool):
    sets = [frozenset(c) for c in centers]
    if exact:
        targets = set(sets)
        return lambda gamma: frozenset(gamma) in targets
    return lambda gamma: any(s <= set(gamma) for s in sets)


def _check_lc(pair: ToricPair):
    bad = [i for i, b in enumerate(pair.boundary) if b > 1]
    if bad:
        v = pair.fan.rays[bad[0]]
        raise NotLogCanonical(f"log discrepancy {1 - pair.boundary[bad[0]]} < 0 at ray {v}",
                              witness=v)


def _face_in(fan: Fan, sigma: Cone, support: Iterable[int]) -> Cone:
    """Smallest face of ``sigma`` containing the given rays of ``sigma``."""
    support = list(support)
    if fan.is_simplicial_cone(sigma):
        return make_cone(support)
    facets, _ = fan.description(sigma)
    tight = [u for u in facets if all(lat.dot(u, fan.rays[i]) == 0 for i in support)]
    return make_cone(i for i in sigma if all(lat.dot(u, fan.rays[i]) == 0 for u in tight))


def mld(pair: ToricPair, center_cones: Iterable[Iterable[int]], exact: bool = False):
    """Minimal log discrepancy over toric valuations with a prescribed center.

    With ``exact=False`` (the default) a valuation v counts when its center
    V(gamma), gamma the cone with v in its relative interior, lies in the
    closed locus given by the union of V(tau) for tau in ``center_cones``,
    i.e. some tau is a face of gamma.  With ``exact=True`` the center must be
    the generic point of one of the V(tau), i.e. gamma is in the list.

    Returns ``(value, witness)``; the witness is a primitive vector attaining
    the minimum, the lexicographically smallest among ties.

    Lattice points of each simplex of a (pulling) triangulation of a relevant
    maximal cone are written as ``p + sum k_i v_i`` with ``p`` in the
    fundamental parallelepiped; since the log discrepancy is nonnegative on
    the rays only ``k_i`` in {0, 1} can be optimal.
    """
    fan = pair.fan
    centers = [make_cone(c) for c in center_cones]
    if not centers:
        raise ValueError("center_cones must be nonempty")
    known = set(fan.all_cones)
    for c in centers:
        if c not in known:
            raise UnknownCone(f"{c} is not a cone of the fan", cone=c)
    _check_lc(pair)
    psi = pair.psi
    admissible = _admissible(centers, exact)
    best = None
    for si, sigma in enumerate(fan.cones):
        if not any(set(c) <= set(sigma) for c in centers):
            continue
        m = psi.functionals[si]
        for simplex in pulling_triangulation(fan, sigma):
            rays = fan.generators(simplex)
            weights = [lat.dot(m, r) for r in rays]
            for p, lam in lat.parallelepiped_points(rays):
                base = lat.dot(m, p)
                supp = [simplex[i] for i, x in enumerate(lam) if x > 0]
                free = [i for i, x in enumerate(lam) if x == 0]
                for k in range(len(free) + 1):
                    for bump in itertools.combinations(free, k):
                        if not supp and not bump:
                            continue
                        value = base + sum(weights[i] for i in bump)
                        if best is not None and value > best[0]:
                            continue
                        gamma = _face_in(fan, sigma, supp + [simplex[i] for i in bump])
                        if not admissible(gamma):
                            continue
                        v = lat.vec_add(p, lat.vec_sum((rays[i] for i in bump), fan.dim))
                        w = lat.primitive(v)
                        value = psi.on_cone(si, w)
                        cand = (value, w)
                        if best is None or cand < best:
                            best = cand
    if best is None:
        raise ValueError("no valuation has a center in the given locus")
    return best


def mld_by_enumeration(pair: ToricPair, center_cones: Iterable[Iterable[int]],
                       exact: bool = False, zero_box: int = 8):
    """Same contract as :func:`mld`, computed by bounded enumeration.

    The search bound U is the least log discrepancy among the ray sums of the
    admissible cones (each such sum lies in the relative interior of its
    cone); every relevant maximal cone is then scanned for lattice points
    with log discrepancy at most U.  When a ray has log discrepancy zero the
    region is unbounded and the coordinate box ``zero_box`` is used instead.
    """
    fan = pair.fan
    centers = [make_cone(c) for c in center_cones]
    _check_lc(pair)
    psi = pair.psi
    admissible = _admissible(centers, exact)
    candidates = [g for g in fan.all_cones if g and admissible(g)]
    if not candidates:
        raise ValueError("no valuation has a center in the given locus")
    upper = min(psi(lat.primitive(fan.interior_point(g))) for g in candidates)
    best = None
    for si, sigma in enumerate(fan.cones):
        if not any(set(c) <= set(sigma) for c in centers):
            continue
        m = psi.functionals[si]
        gens = fan.generators(sigma)
        weights = [lat.dot(m, r) for r in gens]
        if all(w > 0 for w in weights):
            box = max(-(-upper * max(abs(x) for x in r) // w) for r, w in zip(gens, weights))
        else:
            box = zero_box
        ineqs = [(u, 0) for u in lat.facet_normals(gens, fan.dim)]
        den = math.lcm(*(x.denominator for x in m))
        ineqs.append((tuple(-int(x * den) for x in m), -upper * den))
        for v in lat.enumerate_points(ineqs, int(box), fan.dim):
            if not any(v) or not lat.is_primitive(v):
                continue
            gamma = fan.minimal_containing_cone(v)
            if not admissible(gamma):
                continue
            cand = (psi.on_cone(si, v), v)
            if best is None or cand < best:
                best = cand
    return best


def mld_at_cone(pair: ToricPair, cone: Iterable[int]):
    """m.l.d. at the generic point of V(cone)."""
    return mld(pair, [make_cone(cone)], exact=True)


def is_canonical_in_codim(pair: ToricPair, k: int = 2, strict: bool = False) -> bool:
    """Log discrepancy >= 1 (> 1 when ``strict``) over every center of codim >= k."""
    cones = [c for c in pair.fan.all_cones if pair.fan.cone_dim(c) >= k]
    if not cones:
        return True
    value, _ = mld(pair, cones, exact=True)
    return value > 1 if strict else value >= 1
