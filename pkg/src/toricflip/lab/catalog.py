"""Named toric contractions with known invariants.

Most entries are circuits: n + 1 rays in Z^n satisfying one relation

    u_0 + ... + u_{r-1} = a_0 w_0 + ... + a_{r-1} w_{r-1},   n = 2r - 1.

The coarse fan Z is the single cone on all rays.  X is the triangulation
whose maximal cones omit one w_i; its exceptional locus is V(cone(u)), a
weighted projective space P(a_0, ..., a_{r-1}), and -K is ample over Z
exactly when sum(a) > r.  The opposite triangulation (cones omitting one u_j)
is the flip and is smooth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .. import lattice as lat
from ..contraction import Contraction, make_contraction
from ..errors import CatalogError
from ..fan import Fan
from ..toricpair import canonical_divisor

LITERATURE = "literature"
DERIVED = "derived"


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    parameters: tuple
    contraction: Contraction
    expected: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    flip_divisor: tuple | None = None
    symmetry: tuple | None = None

    @property
    def n(self) -> int:
        return self.contraction.n


def _circuit(rays, omit):
    """Coarse cone on ``rays`` and the triangulation dropping each of ``omit``."""
    rays = [tuple(r) for r in rays]
    everything = tuple(range(len(rays)))
    fine = Fan(rays, [tuple(i for i in everything if i != j) for j in omit])
    coarse = Fan(rays, [everything])
    return fine, coarse


def weighted_rays(weights) -> list:
    """Rays w_0..w_{r-1}, u_0..u_{r-1} realizing the weighted circuit."""
    r = len(weights)
    n = 2 * r - 1
    basis = lat.identity(n)
    w = [basis[i] for i in range(r)]
    u = [basis[r + j] for j in range(r - 1)]
    last = lat.vec_sub(lat.vec_sum((lat.vec_scale(a, v) for a, v in zip(weights, w)), n),
                       lat.vec_sum(u, n))
    return w + u + [last]


def weighted_length(weights) -> Fraction:
    """-K.C minimized over the walls of X, by the wall relation formula."""
    r = len(weights)
    excess = sum(weights) - r
    return min(Fraction(gcd(a, b) * excess, a * b)
               for i, a in enumerate(weights) for b in weights[i + 1:])


def swap_automorphism(r: int) -> tuple:
    """Unimodular matrix exchanging w_i and u_i in the unit-weight circuit."""
    n = 2 * r - 1
    rays = weighted_rays([1] * r)
    images = rays[r:] + rays[:r]
    # columns: image of e_0..e_{r-1} (the w) and e_r..e_{2r-2} (u_0..u_{r-2})
    cols = images[:r] + images[r:2 * r - 1]
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def weighted(weights, name: str | None = None) -> CatalogEntry:
    weights = tuple(int(a) for a in weights)
    r = len(weights)
    if r < 2 or any(a < 1 for a in weights):
        raise CatalogError("weighted needs r >= 2 positive weights", weights=weights)
    rays = weighted_rays(weights)
    if not all(lat.is_primitive(v) for v in rays):
        raise CatalogError("weights give a non primitive ray", weights=weights)
    fine, coarse = _circuit(rays, range(r))
    c = make_contraction(fine, coarse)
    expected = {"n": 2 * r - 1, "d_min": r - 1, "d_max": r - 1, "pure": True,
                "l": weighted_length(weights), "c_plus": r}
    provenance = {k: DERIVED for k in expected}
    # the ray divisor of u_0 meets every wall negatively
    flip_divisor = tuple(Fraction(int(i == r)) for i in range(2 * r))
    return CatalogEntry(name or "weighted", weights, c, expected, provenance, flip_divisor)


def generalized_atiyah(d: int) -> CatalogEntry:
    """Small resolution of the cone over the Segre embedding of P^d x P^d."""
    d = int(d)
    if d < 1:
        raise CatalogError("generalized_atiyah needs d >= 1", d=d)
    e = weighted([1] * (d + 1), "generalized_atiyah")
    expected = dict(e.expected, a=Fraction(d + 1), l=Fraction(0))
    provenance = dict(e.provenance, a=LITERATURE)
    return CatalogEntry("generalized_atiyah", (d,), e.contraction, expected, provenance,
                        e.flip_divisor, swap_automorphism(d + 1))


def atiyah() -> CatalogEntry:
    e = generalized_atiyah(1)
    return CatalogEntry("atiyah", (), e.contraction, e.expected, e.provenance,
                        e.flip_divisor, e.symmetry)


def francia() -> CatalogEntry:
    """Index two point on a flipping curve; flipped by D = K."""
    e = weighted((1, 2), "francia")
    expected = dict(e.expected, a=Fraction(3, 2), l=Fraction(1, 2))
    provenance = dict(e.provenance, a=LITERATURE, l=LITERATURE)
    return CatalogEntry("francia", (), e.contraction, expected, provenance,
                        canonical_divisor(e.contraction.fine))


def benveniste_boundary() -> CatalogEntry:
    """A curve C of transversal A_1 points contracted with -K.C = 1.

    Contracting P^1 x P^1 with normal bundle O(-1, -2) in a smooth 3-fold
    along the second factor produces C; the star subdivision of cone(q1, q2)
    at (0, 0, 1) recovers the smooth 3-fold.
    """
    rays = [(1, 0, 1), (-1, 0, 0), (0, 1, 2), (0, -1, 0)]  # p1, p2, q1, q2
    fine = Fan(rays, [(0, 2, 3), (1, 2, 3)])
    coarse = Fan(rays, [(0, 1, 2, 3)])
    c = make_contraction(fine, coarse)
    expected = {"n": 3, "d_min": 1, "d_max": 1, "pure": True, "a": Fraction(1),
                "l": Fraction(1), "terminal": False}
    return CatalogEntry("benveniste_boundary", (), c, expected,
                        {k: DERIVED for k in expected}, canonical_divisor(fine))


def quotient_point(n: int, index: int) -> CatalogEntry:
    """Isolated cyclic quotient singularity: cone(e_1..e_{n-1}, (1,..,1,index))."""
    n, index = int(n), int(index)
    if n < 2 or index < 1:
        raise CatalogError("quotient_point needs n >= 2 and index >= 1", n=n, index=index)
    rays = [tuple(int(i == j) for i in range(n)) for j in range(n - 1)]
    rays.append(tuple([1] * (n - 1) + [index]))
    cone = Fan(rays, [tuple(range(n))])
    c = make_contraction(cone, cone)
    a = Fraction(n) if index == 1 else 1 + Fraction(n - 2, index)
    expected = {"n": n, "a_point": a, "multiplicity": index}
    return CatalogEntry("quotient_point", (n, index), c, expected,
                        {k: DERIVED for k in expected})


NAMES = ("atiyah", "generalized_atiyah", "francia", "weighted", "benveniste_boundary",
         "quotient_point")


def catalog(name: str, *params) -> CatalogEntry:
    """Build a named entry; parameters are integers."""
    try:
        params = tuple(int(p) for p in params)
    except (TypeError, ValueError):
        raise CatalogError(f"integer parameters expected, got {params}") from None
    arity = {"atiyah": 0, "francia": 0, "benveniste_boundary": 0,
             "generalized_atiyah": 1, "quotient_point": 2}
    if name not in NAMES:
        raise CatalogError(f"unknown catalog entry {name!r}; known: {', '.join(NAMES)}")
    if name == "weighted":
        return weighted(params)
    if len(params) != arity[name]:
        raise CatalogError(f"{name} takes {arity[name]} parameter(s)", params=params)
    builder = {"atiyah": atiyah, "francia": francia, "benveniste_boundary": benveniste_boundary,
               "generalized_atiyah": generalized_atiyah, "quotient_point": quotient_point}[name]
    return builder(*params)
