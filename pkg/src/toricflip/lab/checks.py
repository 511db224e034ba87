"""Checkers for the toric instances of the conjectures on minimal log discrepancies."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .. import lattice as lat
from ..contraction import (AMPLE, Contraction, d_invariant, is_nef, minus,
                           mld_in_exceptional_locus, relative_positivity, with_boundary)
from ..errors import NotApplicable, NotDContraction, NotRCartier
from ..fan import Fan, is_smooth, lattice_isomorphism, make_cone
from ..flip import d_flip
from ..report import NOT_APPLICABLE, PASS, VIOLATION, CheckReport
from ..toricpair import ToricPair, divisor, global_functional, mld
from .catalog import weighted_rays


def _ceil(q: Fraction) -> int:
    return math.ceil(q)


# ---------------------------------------------------------------------------
# a(X, B, P) <= codim P


def check_conj_mld(pair: ToricPair, cone: Sequence[int]) -> CheckReport:
    """mld at the generic point of V(cone) is at most its codimension, with
    equality exactly at smooth cones whose rays carry no boundary."""
    cone = make_cone(cone)
    fan = pair.fan
    if not cone:
        return CheckReport("conj_mld", NOT_APPLICABLE, notes=["zero cone: no valuation"])
    if not pair.is_log_canonical:
        return CheckReport("conj_mld", NOT_APPLICABLE, notes=["pair is not log canonical"])
    value, witness = mld(pair, [cone], exact=True)
    codim = fan.cone_dim(cone)
    smooth = is_smooth(fan, cone)
    clean = all(pair.boundary[i] == 0 for i in cone)
    bad = []
    if value > codim:
        bad.append(f"mld {value} > codim {codim}")
    if _ceil(value) > codim:
        bad.append(f"ceil(mld) {_ceil(value)} > codim {codim}")
    if value == codim and not (smooth and clean):
        bad.append("equality at a singular cone or with nonzero boundary")
    if smooth and clean and value != codim:
        bad.append(f"smooth cone without boundary has mld {value} != {codim}")
    values = {"mld": value, "codim": codim, "smooth": smooth, "boundary_free": clean,
              "equality": value == codim}
    return CheckReport("conj_mld", VIOLATION if bad else PASS, values,
                       [{"witness": witness, "problem": b} for b in bad])


# ---------------------------------------------------------------------------
# Borisov's bounds for isolated singularities


def segre_cone_rays(d: int) -> list:
    return weighted_rays([1] * (d + 1))


def is_isolated(fan: Fan, cone) -> bool:
    cone = make_cone(cone)
    return all(is_smooth(fan, f) for f in fan.cone_faces(cone) if f != cone)


def is_q_gorenstein(fan: Fan, cone) -> bool:
    return global_functional(fan, [1] * len(fan.rays), make_cone(cone)) is not None


def check_borisov(cone_fan: Fan) -> CheckReport:
    """a(P) <= (n+1)/2 at an isolated Q-Gorenstein toric point, at most n/2 for
    simplicial cones, and (n+1)/2 only for the cone over P^d x P^d."""
    n = cone_fan.dim
    if len(cone_fan.cones) != 1 or cone_fan.cone_dim(cone_fan.cones[0]) != n:
        return CheckReport("borisov", NOT_APPLICABLE, notes=["needs one full dimensional cone"])
    sigma = cone_fan.cones[0]
    if is_smooth(cone_fan, sigma):
        return CheckReport("borisov", NOT_APPLICABLE, notes=["smooth point"])
    if not is_isolated(cone_fan, sigma):
        return CheckReport("borisov", NOT_APPLICABLE, notes=["singularity is not isolated"])
    if not is_q_gorenstein(cone_fan, sigma):
        return CheckReport("borisov", NOT_APPLICABLE, notes=["K is not Q-Cartier"])
    a, witness = mld(ToricPair(cone_fan), [sigma], exact=True)
    simplicial = cone_fan.is_simplicial_cone(sigma)
    top = Fraction(n + 1, 2)
    bad = []
    if a > top:
        bad.append(f"a = {a} > (n+1)/2")
    if simplicial and a > Fraction(n, 2):
        bad.append(f"simplicial cone with a = {a} > n/2")
    segre = None
    if a == top:
        segre = n % 2 == 1 and lattice_isomorphism(cone_fan.generators(sigma),
                                                   segre_cone_rays((n - 1) // 2)) is not None
        if not segre:
            bad.append("a = (n+1)/2 at a cone not isomorphic to the Segre cone")
    values = {"a": a, "n": n, "simplicial": simplicial, "equality": a == top,
              "segre": segre, "witness": witness}
    return CheckReport("borisov", VIOLATION if bad else PASS, values, bad)


# ---------------------------------------------------------------------------
# d >= ceil(a - 1) and its equality case


def effective_representative(c: Contraction, values: Sequence) -> tuple:
    """Add a linear function so that every coefficient becomes positive.

    Works when the coarse fan has one maximal cone (the local setting); the
    functional is the sum of the primitive facet normals, which is positive
    on every ray.
    """
    values = divisor(values)
    coarse = c.coarse
    if len(coarse.cones) != 1:
        raise NotApplicable("effective representative needs a single coarse cone")
    normals, _ = coarse.description(coarse.cones[0])
    m = lat.vec_sum(normals, coarse.dim) if normals else (0,) * coarse.dim
    steps = [lat.dot(m, v) for v in c.fine.rays]
    if any(s <= 0 for s in steps):
        raise NotApplicable("coarse cone is not full dimensional")
    k = max([math.floor(-x / s) + 1 for x, s in zip(values, steps)] + [0])
    return tuple(x + k * s for x, s in zip(values, steps))


def perturb_to_log_contraction(c: Contraction, D: Sequence, max_halvings: int = 40):
    """B' = B + eps * A with A ~ D effective, so that -(K+B') is ample over Z.

    -(K+B) must be nef and -D ample over Z.  Starting from eps small enough to
    keep the boundary below one, eps is halved until a(X, B', E) keeps the
    value of ceil(a - 1); a' is recomputed exactly at each step.  Returns
    ``(contraction, eps)``.
    """
    if not is_nef(relative_positivity(c, minus(c.pair.k_plus_b))):
        raise NotApplicable("-(K+B) is not nef over Z")
    if relative_positivity(c, minus(D)) != AMPLE:
        raise NotDContraction("-D is not ample over Z")
    a, _ = mld_in_exceptional_locus(c)
    target = _ceil(a - 1)
    A = effective_representative(c, D)
    room = [(1 - b) / x for b, x in zip(c.boundary, A) if x > 0]
    eps = min([Fraction(1, 2)] + [r / 2 for r in room])
    for _ in range(max_halvings):
        if eps > 0:
            boundary = tuple(b + eps * x for b, x in zip(c.boundary, A))
            trial = with_boundary(c, boundary)
            if all(b < 1 or b0 == 1 for b, b0 in zip(boundary, c.boundary)) \
                    and trial.pair.is_log_canonical:
                a2, _ = mld_in_exceptional_locus(trial)
                if _ceil(a2 - 1) == target:
                    return trial, eps
        eps /= 2
    raise NotApplicable("no perturbation preserving ceil(a - 1) found")


def check_conj_mineq(c: Contraction, flip_divisor: Sequence | None = None) -> CheckReport:
    """d >= ceil(a - 1) (d > a - 1 when -(K+B) is ample), and in the equality
    case CDM, NSN and PDM on the flip."""
    name = "conj_mineq"
    if c.exceptional_locus.is_empty:
        return CheckReport(name, NOT_APPLICABLE, notes=["isomorphism"])
    try:
        positivity = relative_positivity(c, minus(c.pair.k_plus_b))
    except NotRCartier:
        return CheckReport(name, NOT_APPLICABLE, notes=["K+B is not R-Cartier"])
    if not is_nef(positivity):
        return CheckReport(name, NOT_APPLICABLE, notes=["-(K+B) is not nef over Z"])
    if not c.pair.is_log_canonical:
        return CheckReport(name, NOT_APPLICABLE, notes=["pair is not log canonical"])
    d_min, d_max, pure = d_invariant(c)
    a, witness = mld_in_exceptional_locus(c)
    bad = []
    if d_min < _ceil(a - 1):
        bad.append(f"d = {d_min} < ceil(a - 1) = {_ceil(a - 1)}")
    log_fano = positivity == AMPLE
    if log_fano and not d_min > a - 1:
        bad.append(f"log Fano case with d = {d_min} <= a - 1 = {a - 1}")
    values = {"d_min": d_min, "d_max": d_max, "pure": pure, "a": a, "witness": witness,
              "ceil_a_minus_1": _ceil(a - 1), "log_fano": log_fano,
              "equality": d_min == _ceil(a - 1)}
    notes = []
    smooth_clean = all(is_smooth(c.fine, s) for s in c.fine.cones) and \
        all(b == 0 for b in c.boundary)
    if smooth_clean:
        # a = n - d_max for smooth X and B = 0, so the inequality reads
        # d_min + d_max >= n - 1; for pure E this is Wisniewski's d >= (n-1)/2
        values["wisniewski"] = pure
        if d_min + d_max < c.n - 1:
            bad.append(f"smooth: d_min + d_max = {d_min + d_max} < n - 1")
        if pure and Fraction(d_min) < Fraction(c.n - 1, 2):
            bad.append(f"smooth pure: d = {d_min} < (n-1)/2")
    if values["equality"]:
        rec = None
        try:
            if log_fano:
                rec = d_flip(c, c.pair.k_plus_b)
            elif flip_divisor is not None:
                perturbed, eps = perturb_to_log_contraction(c, flip_divisor)
                values["epsilon"] = eps
                rec = d_flip(perturbed, perturbed.pair.k_plus_b)
            else:
                notes.append("equality case: no flip divisor supplied")
        except (NotApplicable, NotDContraction) as exc:
            notes.append(f"equality case not checked: {exc}")
        if rec is not None:
            bad += _equality_properties(rec, d_min, pure, values)
    return CheckReport(name, VIOLATION if bad else PASS, values, bad, notes=notes)


def _equality_properties(rec, d: int, pure: bool, values: dict) -> list:
    bad = []
    comps = rec.transform_E
    plus = rec.target.fine
    codims = [plus.cone_dim(t) for t in comps]
    c_min = min(codims) if codims else None
    values["c_plus"] = c_min
    if c_min != d + 1:
        bad.append(f"CDM: c+ = {c_min} != d + 1 = {d + 1}")
    nsn = [t for t, k in zip(comps, codims) if k == c_min]
    singular = [t for t in nsn if not is_smooth(plus, t)]
    values["nsn"] = not singular
    if singular:
        bad.append(f"NSN: singular generic point of the transform at {singular}")
    if pure:
        values["pdm"] = all(k == d + 1 for k in codims)
        if not values["pdm"]:
            bad.append(f"PDM: transform codimensions {codims}")
    if rec.source.is_small and rec.target.is_small and not rec.trivial:
        e_plus = set(rec.target.exceptional_locus.components)
        values["e_plus_is_transform"] = e_plus == set(comps)
        if e_plus != set(comps):
            bad.append("E+ differs from the transform of E")
    return bad
