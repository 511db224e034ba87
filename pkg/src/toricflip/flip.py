"""Toric D-flips by regular subdivision, and checks of their basic properties.

For a contraction X/Z with -D ample over Z, the flip X+ is the ample model of
D over Z: every coarse cone is subdivided by the lower hull of its rays
lifted to the heights D(v).  The PL function of D+ is then convex, i.e. D+ is
nef over Z, and strictly convex across every wall of the hull.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import lattice as lat
from .contraction import (AMPLE, TRIVIAL, Contraction, d_invariant, is_nef, minus,
                          relative_positivity)
from .errors import DegenerateHeights, NotDContraction, NotRCartier
from .fan import Fan, Refinement, common_refinement, make_cone, pulling_triangulation
from .report import MINUS_INFINITY, NOT_APPLICABLE, PASS, VIOLATION, CheckReport
from .toricpair import ToricPair, divisor, global_functional


# ---------------------------------------------------------------------------
# Regular subdivisions


def regular_subdivision(rays: Sequence[Sequence[int]], cone: Iterable[int],
                        heights: Sequence, lower: bool = True):
    """Cells of the regular subdivision of ``cone`` induced by ``heights``.

    ``rays`` is the full ray list, ``cone`` indexes into it and ``heights`` is
    aligned with ``rays``.  Each maximal cell is the set of rays tight at a
    vertex m of {m : <m, v_i> <= h_i}; rays never tight lie above the hull
    and are dropped.  With ``lower=False`` the heights are negated.

    Returns ``(cells, non_unique)``: non simplicial proper cells (ties) are
    refined by a pulling triangulation and flagged.
    """
    rays = lat.as_matrix(rays)
    idx = sorted(set(cone))
    dim = len(rays[0])
    sign = 1 if lower else -1
    h = {i: sign * Fraction(heights[i]) for i in idx}
    cells = set()
    for subset in itertools.combinations(idx, dim):
        vecs = [rays[i] for i in subset]
        if lat.rank(vecs) < dim:
            continue
        m = lat.solve_rational(vecs, [h[i] for i in subset])
        values = {i: lat.dot(m, rays[i]) for i in idx}
        if any(values[i] > h[i] for i in idx):
            continue
        cells.add(make_cone(i for i in idx if values[i] == h[i]))
    cells = sorted(cells)
    if len(cells) == 1 and set(cells[0]) == set(idx):
        return cells, False
    out = []
    non_unique = False
    for cell in cells:
        if len(cell) == dim:
            out.append(cell)
            continue
        non_unique = True
        out.extend(pulling_triangulation(Fan(rays, [cell], dim), cell))
    return sorted(out), non_unique


# ---------------------------------------------------------------------------
# Flip records


def _on_rays(fan_from: Fan, values: Sequence, fan_to: Fan) -> tuple:
    """Restrict ray values to the rays of another fan (matched by vector)."""
    index = {v: i for i, v in enumerate(fan_from.rays)}
    return tuple(Fraction(values[index[v]]) for v in fan_to.rays)


def rational_transform(source: Fan, target: Fan, cones: Iterable[Iterable[int]],
                       refinement: Fan | None = None) -> list:
    """Birational transform in ``target`` of the union of V(tau), tau in ``cones``.

    Computed on the common refinement W: each cone omega of W maps into
    V(gamma) on the source and V(gamma+) on the target, gamma and gamma+ the
    cones carrying its relative interior.  The transform is the union of
    V(gamma+) over the omega lying over the given locus; its components are
    the minimal such gamma+.
    """
    cones = [set(make_cone(c)) for c in cones]
    if not cones:
        return []
    w = refinement if refinement is not None else common_refinement(source, target)
    hits = set()
    for omega in w.all_cones:
        p = w.interior_point(omega)
        gamma = set(source.minimal_containing_cone(p))
        if any(t <= gamma for t in cones):
            hits.add(target.minimal_containing_cone(p))
    minimal = [g for g in hits if not any(set(o) < set(g) for o in hits)]
    return sorted(minimal, key=lambda g: (len(g), g))


@dataclass
class FlipRecord:
    """A (directed) D-quasi-flip X -> X+ over Z."""

    source: Contraction
    target: Contraction
    D: tuple
    D_plus: tuple
    transform_E: list = field(default_factory=list)
    non_unique: bool = False
    trivial: bool = False
    log_form: bool = False

    @property
    def c_plus(self) -> tuple:
        """(min, max) codimension of the components of the transform of E."""
        if not self.transform_E:
            return MINUS_INFINITY, MINUS_INFINITY
        dims = [self.target.fine.cone_dim(t) for t in self.transform_E]
        return min(dims), max(dims)

    @property
    def c_plus_min(self):
        return self.c_plus[0]

    @property
    def c_plus_max(self):
        return self.c_plus[1]

    @property
    def pure_c_plus(self) -> bool:
        return self.c_plus[0] == self.c_plus[1]


def make_record(source: Contraction, target: Contraction, D: Sequence, D_plus: Sequence,
                **flags) -> FlipRecord:
    """Assemble a record for given fans and divisors, computing the transform of E."""
    e = source.exceptional_locus.components
    transform = rational_transform(source.fine, target.fine, e) if e else []
    return FlipRecord(source, target, divisor(D), divisor(D_plus), transform, **flags)


def _is_log_form(c: Contraction, D: tuple) -> bool:
    return D == c.pair.k_plus_b


def d_flip(c: Contraction, D: Sequence, allow_trivial: bool = True) -> FlipRecord:
    """The D-flip of a D-contraction (-D ample over Z).

    A divisor numerically trivial over Z gives the trivial record with
    target = source (or DegenerateHeights when ``allow_trivial`` is false).
    """
    D = divisor(D)
    fine, coarse = c.fine, c.coarse
    if len(D) != len(fine.rays):
        raise ValueError("one divisor coefficient per ray expected")
    try:
        positivity = relative_positivity(c, minus(D))
    except NotRCartier as exc:
        raise NotDContraction(f"D is not R-Cartier: {exc}") from exc
    log_form = _is_log_form(c, D)
    if positivity == TRIVIAL:
        if not allow_trivial:
            raise DegenerateHeights("D is numerically trivial over Z")
        return make_record(c, c, D, D, trivial=True, log_form=log_form)
    if positivity != AMPLE:
        raise NotDContraction(f"-D is {positivity} over Z, not ample")
    heights = _on_rays(fine, D, coarse)
    cells = []
    non_unique = False
    for sigma in coarse.cones:
        sub, nu = regular_subdivision(coarse.rays, sigma, heights)
        cells.extend(sub)
        non_unique |= nu
    used = sorted({i for cell in cells for i in cell})
    remap = {old: new for new, old in enumerate(used)}
    plus_fan = Fan([coarse.rays[i] for i in used],
                   sorted(make_cone(remap[i] for i in cell) for cell in cells), coarse.dim)
    target = Contraction(Refinement(plus_fan, coarse),
                         ToricPair(plus_fan, _on_rays(fine, c.boundary, plus_fan)))
    D_plus = _on_rays(fine, D, plus_fan)
    return make_record(c, target, D, D_plus, non_unique=non_unique, log_form=log_form)


def inverse(rec: FlipRecord) -> FlipRecord:
    """The record read backwards: X+ -> X with divisor -D+."""
    return make_record(rec.target, rec.source, minus(rec.D_plus), minus(rec.D),
                       non_unique=rec.non_unique, trivial=rec.trivial)


def anti_flip(rec: FlipRecord) -> FlipRecord:
    """d_flip of the flipped contraction with the heights negated."""
    return d_flip(rec.target, minus(rec.D_plus))


# ---------------------------------------------------------------------------
# Validation


def _pushforward_difference(rec: FlipRecord):
    z = rec.source.coarse
    d = _on_rays(rec.source.fine, rec.D, z)
    dp = _on_rays(rec.target.fine, rec.D_plus, z)
    return global_functional(z, [a - b for a, b in zip(dp, d)])


def validate_qflip(rec: FlipRecord) -> dict:
    """Independent checks of a quasi-flip record; maps check name -> list of
    problems (empty when the check passes)."""
    out = {"semiample": [], "pushforward": [], "log_form": [], "log_canonical": []}
    src, tgt = rec.source, rec.target
    if src.coarse != tgt.coarse:
        out["pushforward"].append("source and target have different bases")
        return out
    try:
        pos = relative_positivity(tgt, rec.D_plus)
        if not is_nef(pos):
            out["semiample"].append(f"D+ is {pos} over Z")
    except NotRCartier as exc:
        out["semiample"].append(f"D+ is not R-Cartier: {exc}")
    try:
        if _pushforward_difference(rec) is None:
            out["pushforward"].append("f+_* D+ and f_* D differ by a non linear function")
    except (KeyError, ValueError):
        out["pushforward"].append("a ray of Z is missing from X or X+")
    if rec.log_form:
        if rec.D != src.pair.k_plus_b:
            out["log_form"].append("D differs from K + B")
        if rec.D_plus != tgt.pair.k_plus_b:
            out["log_form"].append("D+ differs from K+ + B+")
        b = _on_rays(src.fine, src.boundary, src.coarse)
        bp = _on_rays(tgt.fine, tgt.boundary, src.coarse)
        if b != bp:
            out["log_form"].append("f+_* B+ differs from f_* B")
    for name, pair in (("X", src.pair), ("X+", tgt.pair)):
        if not pair.is_boundary:
            out["log_canonical"].append(f"boundary on {name} has a coefficient outside [0, 1]")
        elif not pair.is_log_canonical:
            out["log_canonical"].append(f"pair on {name} is not log canonical")
    return out


def qflip_ok(rec: FlipRecord) -> bool:
    return not any(validate_qflip(rec).values())


# ---------------------------------------------------------------------------
# Lemma and monotonicity


def _lemma_values(rec: FlipRecord):
    d_min, d_max, pure = d_invariant(rec.source)
    c_min, c_max = rec.c_plus
    bad = []
    if c_min > d_min + 1:
        bad.append(f"c+ = {c_min} > d + 1 = {d_min + 1}")
    if pure and c_max > d_max + 1:
        bad.append(f"max c+ = {c_max} > d + 1 = {d_max + 1}")
    values = {"d_min": d_min, "d_max": d_max, "pure": pure, "c_plus_min": c_min,
              "c_plus_max": c_max}
    return values, bad


def _lemma_applies(c: Contraction, D: Sequence) -> bool:
    if c.exceptional_locus.is_empty:
        return False
    try:
        return relative_positivity(c, minus(D)) == AMPLE
    except NotRCartier:
        return False


def _dual_values(rec: FlipRecord):
    """c <= d+ + 1 for the same E and its transform, in minimal and maximal form.

    c runs over codimensions of the components of E in X and d+ over the
    dimensions of the components of the transform in X+.
    """
    n = rec.source.n
    c = [rec.source.fine.cone_dim(t) for t in rec.source.exceptional_locus.components]
    dp = [n - rec.target.fine.cone_dim(t) for t in rec.transform_E]
    bad = []
    if min(c) > min(dp) + 1:
        bad.append(f"min c = {min(c)} > min d+ + 1 = {min(dp) + 1}")
    if max(c) > max(dp) + 1:
        bad.append(f"max c = {max(c)} > max d+ + 1 = {max(dp) + 1}")
    return {"c_min": min(c), "c_max": max(c), "d_plus_min": min(dp),
            "d_plus_max": max(dp)}, bad


def check_lemma(rec: FlipRecord) -> CheckReport:
    """c+ <= d + 1 (for pure E also with the maximal codimension), the dual
    form c <= d+ + 1, and the lemma again on the anti-flip of X+/Z."""
    if rec.trivial or not _lemma_applies(rec.source, rec.D):
        return CheckReport("lemma", NOT_APPLICABLE,
                           notes=["source is not a D-contraction with nonempty E"])
    values, bad = _lemma_values(rec)
    notes = []
    values["dual"], dual_bad = _dual_values(rec)
    bad += [f"dual: {b}" for b in dual_bad]
    if _lemma_applies(rec.target, minus(rec.D_plus)):
        anti = anti_flip(rec)
        values["anti_flip"], anti_bad = _lemma_values(anti)
        bad += [f"anti-flip: {b}" for b in anti_bad]
    else:
        notes.append("anti-flip not applicable: X+ -> Z is not a (-D+)-contraction")
    return CheckReport("lemma", VIOLATION if bad else PASS, values, bad, notes=notes)


def _subdivided_cones(rec: FlipRecord) -> set:
    """Indices of coarse cones where X or X+ differs from Z."""
    out = set()
    for ref in (rec.source.refinement, rec.target.refinement):
        for j, sigma in enumerate(ref.coarse.cones):
            inside = ref.fine_cones_in(j)
            if len(inside) != 1 or \
                    set(ref.fine.generators(inside[0])) != set(ref.coarse.generators(sigma)):
                out.add(j)
    return out


def check_monotonicity(rec: FlipRecord, search_bound=None, zero_cap: int = 2) -> CheckReport:
    """psi+(v) >= psi(v) for primitive v with psi(v) <= search_bound, strictly
    over E when -(K+B) is ample over Z."""
    src, tgt = rec.source, rec.target
    n = src.n
    bound = Fraction(n + 2) if search_bound is None else Fraction(search_bound)
    neg = minus(src.pair.k_plus_b)
    try:
        positivity = relative_positivity(src, neg)
        psi_plus = tgt.pair.psi
    except NotRCartier as exc:
        return CheckReport("monotonicity", NOT_APPLICABLE, notes=[f"not R-Cartier: {exc}"])
    if not is_nef(positivity):
        return CheckReport("monotonicity", NOT_APPLICABLE, notes=["-(K+B) is not nef over Z"])
    if not src.pair.is_log_canonical:
        return CheckReport("monotonicity", NOT_APPLICABLE, notes=["(X, B) is not log canonical"])
    strict = positivity == AMPLE
    psi = src.pair.psi
    e = [set(t) for t in src.exceptional_locus.components]
    e_plus = [set(t) for t in rec.transform_E]
    region = _subdivided_cones(rec)
    fine = src.fine
    seen = set()
    bad = []
    mismatched = []
    checked = 0
    increases = 0
    for si, sigma in enumerate(fine.cones):
        if src.refinement.assignment[si] not in region:
            continue
        for simplex in pulling_triangulation(fine, sigma):
            rays = fine.generators(simplex)
            weights = [psi.on_cone(si, r) for r in rays]
            for v, _ in lat.simplicial_cone_points(rays, weights, bound, zero_cap):
                if not any(v) or v in seen or not lat.is_primitive(v):
                    continue
                seen.add(v)
                checked += 1
                a = psi.on_cone(si, v)
                j = psi_plus.cone_index_of(v)
                a_plus = psi_plus.on_cone(j, v)
                gamma = set(fine.face_containing(sigma, v))
                gamma_plus = set(tgt.fine.face_containing(tgt.fine.cones[j], v))
                over_e = any(t <= gamma for t in e)
                over_e_plus = any(t <= gamma_plus for t in e_plus)
                if over_e != over_e_plus:
                    mismatched.append(v)
                if a_plus > a:
                    increases += 1
                if a_plus < a or (strict and over_e and a_plus == a):
                    bad.append({"v": v, "a": a, "a_plus": a_plus, "over_E": over_e})
    values = {"checked": checked, "strict": strict, "increases": increases,
              "bound": bound, "locus_mismatches": len(mismatched)}
    witnesses = bad + [{"locus_mismatch": v} for v in mismatched]
    return CheckReport("monotonicity", VIOLATION if witnesses else PASS, values, witnesses)


def check_involution(rec: FlipRecord) -> CheckReport:
    """The anti-flip of a small flip returns the original fan."""
    if rec.trivial or not rec.source.is_small or not rec.target.is_small or rec.non_unique:
        return CheckReport("involution", NOT_APPLICABLE,
                           notes=["needs a small flip with a unique subdivision"])
    try:
        back = anti_flip(rec)
    except NotDContraction as exc:
        return CheckReport("involution", VIOLATION, notes=[str(exc)])
    ok = back.target.fine == rec.source.fine
    return CheckReport("involution", PASS if ok else VIOLATION,
                       {"cones": len(back.target.fine.cones)},
                       [] if ok else [list(back.target.fine.cones)])
