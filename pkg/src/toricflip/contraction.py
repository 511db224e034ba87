"""Toric birational contractions f: X -> Z given by fan refinements."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import lattice as lat
from .errors import BadWall, NotApplicable
from .fan import Cone, Fan, Refinement, check_refinement, make_cone, walls
from .report import MINUS_INFINITY, NOT_APPLICABLE, PASS, VIOLATION, CheckReport
from .toricpair import ToricPair, divisor, is_canonical_in_codim, mld, pl_function

AMPLE = "ample"
NEF = "nef"
TRIVIAL = "trivial"
NONE = "none"


@dataclass(frozen=True)
class Contraction:
    """A birational toric contraction with a boundary on the source."""

    refinement: Refinement
    pair: ToricPair

    @property
    def fine(self) -> Fan:
        return self.refinement.fine

    @property
    def coarse(self) -> Fan:
        return self.refinement.coarse

    @property
    def n(self) -> int:
        return self.fine.dim

    @property
    def is_small(self) -> bool:
        return self.refinement.is_small

    @property
    def boundary(self) -> tuple:
        return self.pair.boundary

    @cached_property
    def walls(self) -> list:
        return walls(self.refinement)

    @cached_property
    def exceptional_locus(self) -> "ExceptionalLocus":
        return exceptional_locus(self)


def make_contraction(fine: Fan, coarse: Fan, boundary: Sequence | None = None,
                     validate: bool = True) -> Contraction:
    ref = Refinement(fine, coarse)
    if validate:
        check_refinement(ref)
    return Contraction(ref, ToricPair(fine, boundary))


def with_boundary(c: Contraction, boundary: Sequence) -> Contraction:
    return Contraction(c.refinement, ToricPair(c.fine, boundary))


@dataclass(frozen=True)
class ExceptionalLocus:
    """Irreducible components V(tau) of the exceptional locus, by minimal cone."""

    components: tuple
    dims: tuple

    @property
    def is_empty(self) -> bool:
        return not self.components

    @property
    def codims(self) -> tuple:
        n = self.n
        return tuple(n - d for d in self.dims)

    n: int = 0


def exceptional_locus(c: Contraction) -> ExceptionalLocus:
    """V(tau) is contracted iff the minimal coarse cone containing tau is of
    larger dimension; components are the minimal contracted cones."""
    fine = c.fine
    contracted = [t for t in fine.all_cones
                  if t and c.coarse.cone_dim(c.refinement.coarse_cone_of(t)) > fine.cone_dim(t)]
    cset = [set(t) for t in contracted]
    minimal = [t for t, s in zip(contracted, cset) if not any(o < s for o in cset)]
    minimal.sort(key=lambda t: (fine.cone_dim(t), t))
    return ExceptionalLocus(tuple(minimal), tuple(c.n - fine.cone_dim(t) for t in minimal), c.n)


def d_invariant(c: Contraction):
    """(d_min, d_max, pure) for the exceptional locus; -inf when it is empty."""
    e = c.exceptional_locus
    if e.is_empty:
        return MINUS_INFINITY, MINUS_INFINITY, True
    return min(e.dims), max(e.dims), min(e.dims) == max(e.dims)


def relative_picard_rank(c: Contraction) -> int:
    """Algebraic relative Picard number rho(X/Z) for simplicial X."""
    # the classes of contracted invariant curves span N_1(X/Z); record each
    # by its intersection numbers with the invariant divisors
    rows = [curve_intersection_vector(c, w, l, r) for w, l, r in c.walls]
    return lat.rank(rows) if rows else 0


# ---------------------------------------------------------------------------
# Intersection numbers


def wall_relation(fan: Fan, wall: Cone, left: Cone, right: Cone) -> dict:
    """The primitive relation among the rays of two adjacent simplicial cones.

    Returns a map ray index -> integer coefficient, positive on the two rays
    not in the wall.
    """
    (a,) = set(left) - set(wall)
    (b,) = set(right) - set(wall)
    idx = [a, b] + list(wall)
    cols = [fan.rays[i] for i in idx]
    ker = lat.kernel_basis(lat.transpose(cols), len(cols))
    if len(ker) != 1:
        raise BadWall(f"wall {wall} has a relation space of rank {len(ker)}", wall=wall)
    rel = ker[0]
    if rel[0] < 0:
        rel = tuple(-x for x in rel)
    if rel[0] <= 0 or rel[1] <= 0:
        raise BadWall(f"degenerate relation {rel} across wall {wall}", wall=wall)
    return dict(zip(idx, rel))


def curve_intersection_vector(c: Contraction, wall: Cone, left: Cone | None = None,
                              right: Cone | None = None) -> tuple:
    """(D_r . C) for every ray r, C the curve V(wall)."""
    fan = c.fine
    if left is None or right is None:
        owners = fan.codim_one_faces.get(make_cone(wall), [])
        if len(owners) != 2:
            raise BadWall(f"{wall} is not an interior wall", wall=wall)
        left, right = fan.cones[owners[0]], fan.cones[owners[1]]
    if not (fan.is_simplicial_cone(left) and fan.is_simplicial_cone(right)):
        raise BadWall("intersection numbers need simplicial adjacent cones", wall=wall)
    rel = wall_relation(fan, wall, left, right)
    (a,) = set(left) - set(wall)
    scale = Fraction(lat.multiplicity(fan.generators(wall)),
                     lat.multiplicity(fan.generators(left)) * rel[a])
    out = [Fraction(0)] * len(fan.rays)
    for i, coef in rel.items():
        out[i] = scale * coef
    return tuple(out)


def wall_intersection(c: Contraction, wall, divisor_values: Sequence) -> Fraction:
    """Intersection number D . C for the torus invariant curve C = V(wall).

    ``wall`` is either a cone or a ``(wall, left, right)`` triple.
    """
    if len(wall) == 3 and all(isinstance(x, tuple) for x in wall):
        w, left, right = wall
    else:
        w, left, right = make_cone(wall), None, None
    vec = curve_intersection_vector(c, w, left, right)
    return sum(Fraction(a) * x for a, x in zip(divisor(divisor_values), vec))


def relative_positivity(c: Contraction, divisor_values: Sequence) -> str:
    """Classify a divisor over Z as 'trivial', 'ample', 'nef' or 'none'.

    Works from the bending of its PL function across every interior wall,
    which does not need simplicial cones: the jump of the linear forms of the
    two adjacent cones, evaluated on a ray of one side, has the sign of D . C.
    """
    phi = pl_function(c.fine, divisor_values)
    fan = c.fine
    bends = []
    for w, owners in fan.codim_one_faces.items():
        if fan.cone_dim(w) != fan.dim - 1 or len(owners) != 2:
            continue
        if c.coarse.cone_dim(c.refinement.coarse_cone_of(w)) != fan.dim:
            continue
        i, j = owners
        (r,) = [k for k in fan.cones[j] if k not in w][:1] or [None]
        if r is None:
            continue
        bends.append(phi.on_cone(j, fan.rays[r]) - phi.on_cone(i, fan.rays[r]))
    if all(b == 0 for b in bends):
        return TRIVIAL
    if all(b > 0 for b in bends):
        return AMPLE
    if all(b >= 0 for b in bends):
        return NEF
    return NONE


def is_nef(label: str) -> bool:
    return label in (AMPLE, NEF, TRIVIAL)


def minus(values: Sequence) -> tuple:
    return tuple(-Fraction(x) for x in values)


def anticanonical_intersections(c: Contraction) -> list:
    """[(wall, -(K+B).C)] over the interior walls."""
    neg = minus(c.pair.k_plus_b)
    return [(w, wall_intersection(c, (w, l, r), neg)) for w, l, r in c.walls]


def length(c: Contraction) -> Fraction:
    """Minimal -(K+B).C over the contracted torus invariant curves."""
    if c.exceptional_locus.is_empty:
        raise NotApplicable("length of an isomorphism is undefined")
    values = anticanonical_intersections(c)
    if not values:
        raise NotApplicable("no contracted invariant curve")
    return min(v for _, v in values)


def mld_in_exceptional_locus(c: Contraction):
    """a(X, B, E): (value, witness), or (-inf, None) for an isomorphism."""
    e = c.exceptional_locus
    if e.is_empty:
        return MINUS_INFINITY, None
    return mld(c.pair, e.components)


def check_length_bound(c: Contraction) -> CheckReport:
    """Curves of the exceptional locus in a pair canonical (terminal) in
    codimension two satisfy -(K+B).C <= 1 (< 1)."""
    fan = c.fine
    curves = [t for t in c.exceptional_locus.components if fan.cone_dim(t) == fan.dim - 1]
    if not curves:
        return CheckReport("length_bound", NOT_APPLICABLE, notes=["no curve component"])
    if not is_canonical_in_codim(c.pair, 2):
        return CheckReport("length_bound", NOT_APPLICABLE, notes=["not canonical in codim 2"])
    terminal = is_canonical_in_codim(c.pair, 2, strict=True)
    neg = minus(c.pair.k_plus_b)
    owners = fan.codim_one_faces
    values = {}
    bad = []
    for t in curves:
        i, j = owners[t]
        x = wall_intersection(c, (t, fan.cones[i], fan.cones[j]), neg)
        values[t] = x
        if x > 1 or (terminal and x == 1):
            bad.append(t)
    result = {"terminal": terminal, "curve_values": {str(k): v for k, v in values.items()},
              "l": min(values.values())}
    return CheckReport("length_bound", VIOLATION if bad else PASS, result, witnesses=bad)
