"""Deterministic random instances and the fuzz report stream.

Every instance is drawn from its own ``random.Random`` seeded by the pair
(seed, index), so any single instance can be regenerated in isolation.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .. import io
from .. import lattice as lat
from ..contraction import (AMPLE, Contraction, check_length_bound, d_invariant, minus,
                           relative_positivity)
from ..fan import Fan, Refinement, is_smooth
from ..flip import (check_involution, check_lemma, check_monotonicity, d_flip,
                    regular_subdivision, validate_qflip)
from ..report import NOT_APPLICABLE, PASS, VIOLATION, CheckReport
from ..toricpair import ToricPair
from .checks import check_borisov, check_conj_mineq, check_conj_mld

BOUNDARY_CHOICES = (Fraction(0),) * 4 + (Fraction(1, 2), Fraction(1, 3), Fraction(2, 3),
                                         Fraction(1, 4), Fraction(3, 4), Fraction(1, 5))


class Degenerate(Exception):
    """A random draw to be discarded and retried."""


def instance_rng(seed: int, index: int, salt: str = "") -> random.Random:
    return random.Random(f"{salt}{seed}:{index}")


def random_unimodular(n: int, rng: random.Random, steps: int | None = None) -> tuple:
    m = [list(r) for r in lat.identity(n)]
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        k = rng.choice((-1, 1))
        m[i] = [a + k * b for a, b in zip(m[i], m[j])]
    if n > 1 and rng.random() < 0.5:
        i, j = rng.sample(range(n), 2)
        m[i], m[j] = m[j], m[i]
    return tuple(tuple(r) for r in m)


def _transform(g, rays) -> list:
    return [lat.mat_vec(g, r) for r in rays]


def random_boundary(k: int, rng: random.Random, zero: bool = False) -> tuple:
    if zero or rng.random() < 0.4:
        return (Fraction(0),) * k
    return tuple(rng.choice(BOUNDARY_CHOICES) for _ in range(k))


# ---------------------------------------------------------------------------
# Cones


def random_simplicial_cone(n: int, rng: random.Random, max_mult: int = 20) -> Fan:
    """Random full dimensional simplicial cone of multiplicity <= max_mult."""
    for _ in range(100):
        diag = [1] * n
        budget = rng.randint(1, max_mult)
        for i in rng.sample(range(n), n):
            if budget <= 1:
                break
            k = rng.randint(1, budget)
            diag[i] = k
            budget //= k
        h = [[0] * n for _ in range(n)]
        for i in range(n):
            h[i][i] = diag[i]
            for j in range(i + 1, n):
                h[i][j] = rng.randrange(diag[j]) if diag[j] > 1 else 0
        rays = [tuple(h[i][j] for i in range(n)) for j in range(n)]
        if all(lat.is_primitive(r) for r in rays):
            rays = _transform(random_unimodular(n, rng), rays)
            return Fan(rays, [tuple(range(n))])
    raise Degenerate("no primitive simplicial cone drawn")


def hnf_cones(n: int, max_mult: int) -> list:
    """All simplicial cones with primitive rays and multiplicity <= max_mult,
    one per class under unimodular maps and ray permutations."""
    out = {}
    for mult in range(1, max_mult + 1):
        for diag in _factorizations(mult, n):
            ranges = [range(diag[j]) for i in range(n) for j in range(i + 1, n)]
            for entries in itertools.product(*ranges):
                h = [[0] * n for _ in range(n)]
                it = iter(entries)
                for i in range(n):
                    h[i][i] = diag[i]
                    for j in range(i + 1, n):
                        h[i][j] = next(it)
                rays = [tuple(h[i][j] for i in range(n)) for j in range(n)]
                if not all(lat.is_primitive(r) for r in rays):
                    continue
                key = cone_normal_form(rays)
                out.setdefault(key, key)
    return [Fan(list(k), [tuple(range(n))]) for k in sorted(out)]


def _factorizations(m: int, n: int):
    if n == 1:
        yield (m,)
        return
    for d in range(1, m + 1):
        if m % d == 0:
            for rest in _factorizations(m // d, n - 1):
                yield (d,) + rest


def cone_normal_form(rays) -> tuple:
    """Hermite normal form of the ray matrix, minimized over ray orders."""
    best = None
    n = len(rays[0])
    for perm in itertools.permutations(rays):
        cols = lat.transpose(perm)
        h, _ = lat.hermite_normal_form(cols)
        key = tuple(tuple(h[i][j] for i in range(n)) for j in range(len(perm)))
        if best is None or key < best:
            best = key
    return best


def random_gorenstein_cone(n: int, rng: random.Random, box: int = 2) -> Fan:
    """Cone over a random lattice polytope at height one."""
    for _ in range(200):
        k = rng.randint(n, n + 3)
        pts = {tuple(rng.randint(-box, box) for _ in range(n - 1)) + (1,) for _ in range(k)}
        pts = sorted(pts)
        if len(pts) < n or lat.rank(pts) < n:
            continue
        verts = [p for p in pts if not lat.in_cone(p, [q for q in pts if q != p], n)]
        g = random_unimodular(n, rng)
        return Fan(_transform(g, verts), [tuple(range(len(verts)))])
    raise Degenerate("no full dimensional polytope drawn")


def random_isolated_cone(n: int, rng: random.Random, budget: int = 400) -> Fan:
    """Isolated singular Q-Gorenstein cone: simplicial or Gorenstein."""
    from .checks import is_isolated

    for _ in range(budget):
        fan = random_simplicial_cone(n, rng) if rng.random() < 0.5 else \
            random_gorenstein_cone(n, rng, box=1 if n > 3 else 2)
        sigma = fan.cones[0]
        if not is_smooth(fan, sigma) and is_isolated(fan, sigma):
            return fan
    raise Degenerate("no isolated singular cone drawn")


# ---------------------------------------------------------------------------
# Contractions


@dataclass
class FlipInstance:
    contraction: Contraction
    divisor: tuple
    kind: str

    def to_dict(self) -> dict:
        d = io.contraction_to_dict(self.contraction, self.divisor)
        d["kind"] = self.kind
        return d


def random_circuit_rays(n: int, rng: random.Random, bound: int = 3):
    """n + 1 distinct primitive rays spanning Z^n with a one dimensional
    relation space; returns (rays, relation)."""
    for _ in range(100):
        c = [rng.randint(-bound, bound) for _ in range(n + 1)]
        if not (any(x > 0 for x in c) and any(x < 0 for x in c)):
            continue
        g = math.gcd(*c)
        c = [x // g for x in c]
        basis = lat.kernel_basis([c], n + 1)
        rays = [lat.primitive(tuple(b[i] for b in basis)) for i in range(n + 1)]
        rays = _transform(random_unimodular(n, rng), rays)
        if len(set(rays)) != len(rays):
            continue
        rel = lat.kernel_basis(lat.transpose(rays), n + 1)
        if len(rel) != 1:
            continue
        return rays, rel[0]
    raise Degenerate("no circuit drawn")


def _extremal(rays, idx, dim) -> list:
    return [i for i in idx if not lat.in_cone(rays[i], [rays[j] for j in idx if j != i], dim)]


def _lower_hull_contraction(rays, coarse_idx, heights, boundary, dim):
    """X = lower hull of the heights over the cone on ``coarse_idx``."""
    ext = _extremal(rays, coarse_idx, dim)
    coarse = Fan([rays[i] for i in ext], [tuple(range(len(ext)))], dim)
    cells, non_unique = regular_subdivision(rays, coarse_idx, heights)
    if non_unique:
        raise Degenerate("tie in the lower hull")
    used = sorted({i for c in cells for i in c})
    pos = {old: new for new, old in enumerate(used)}
    fine = Fan([rays[i] for i in used], [tuple(pos[i] for i in c) for c in cells], dim)
    pair = ToricPair(fine, [boundary[i] for i in used])
    return Contraction(Refinement(fine, coarse), pair)


def _auxiliary_divisor(c: Contraction):
    """A ray divisor D with -D ample over Z, or its negative."""
    for j in range(len(c.fine.rays)):
        for sign in (1, -1):
            D = tuple(Fraction(sign * int(i == j)) for i in range(len(c.fine.rays)))
            if relative_positivity(c, minus(D)) == AMPLE:
                return D
    return None


def random_circuit_flip(n: int, rng: random.Random, zero_boundary: bool = False,
                        budget: int = 50) -> FlipInstance:
    """A small (or divisorial) contraction of a circuit with -(K+B) nef.

    X is the lower hull of the log discrepancy heights 1 - b; when these are
    linear on the circuit the pair is a 0-log pair and one of the two
    triangulations is taken with an auxiliary flipping divisor (a flop).
    """
    for _ in range(budget):
        rays, rel = random_circuit_rays(n, rng)
        b = random_boundary(len(rays), rng, zero_boundary)
        idx = list(range(len(rays)))
        heights = [1 - x for x in b]
        try:
            c = _lower_hull_contraction(rays, idx, heights, b, n)
        except Degenerate:
            continue
        if not c.exceptional_locus.is_empty:
            return FlipInstance(c, c.pair.k_plus_b, "circuit")
        plus = [i for i in idx if rel[i] > 0]
        minus_ = [i for i in idx if rel[i] < 0]
        if len(plus) < 2 or len(minus_) < 2:
            continue
        drop = rng.choice((plus, minus_))
        fine = Fan(rays, [tuple(i for i in idx if i != j) for j in drop], n)
        flop = Contraction(Refinement(fine, c.coarse), ToricPair(fine, b))
        D = _auxiliary_divisor(flop)
        if D is not None:
            return FlipInstance(flop, D, "flop")
    raise Degenerate("no circuit contraction drawn")


def random_mixed_flip(n: int, rng: random.Random, zero_boundary: bool = False,
                      budget: int = 50) -> FlipInstance:
    """Extra interior rays over a simplicial or circuit cone, X the lower hull
    of the log discrepancy heights; usually divisorial, sometimes mixed."""
    for _ in range(budget):
        if rng.random() < 0.5:
            base = random_simplicial_cone(n, rng, max_mult=6)
            rays = list(base.rays)
        else:
            rays, _ = random_circuit_rays(n, rng, bound=2)
        k = rng.randint(1, 2)
        for _ in range(k):
            coeffs = [rng.randint(0, 2) for _ in rays]
            if sum(1 for x in coeffs if x) < 2:
                continue
            p = lat.primitive(lat.vec_sum((lat.vec_scale(a, r) for a, r in zip(coeffs, rays)), n))
            if p not in rays:
                rays.append(p)
        if len(rays) == n:
            continue
        b = random_boundary(len(rays), rng, zero_boundary)
        heights = [1 - x for x in b]
        try:
            c = _lower_hull_contraction(rays, list(range(len(rays))), heights, b, n)
        except Degenerate:
            continue
        if c.exceptional_locus.is_empty:
            continue
        return FlipInstance(c, c.pair.k_plus_b, "mixed")
    raise Degenerate("no mixed contraction drawn")


def mixed_dimension_example() -> FlipInstance:
    """Conifold resolved by a diagonal, then star subdivided inside one
    triangle: the exceptional locus has a curve and a divisor."""
    rays = [(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1), (2, 2, 3)]
    fine = Fan(rays, [(0, 1, 2), (1, 2, 4), (1, 3, 4), (2, 3, 4)])
    coarse = Fan(rays[:4], [(0, 1, 2, 3)])
    c = Contraction(Refinement(fine, coarse), ToricPair(fine))
    # -K is not nef here; this divisor is anti-ample over Z
    D = tuple(Fraction(x) for x in (-2, -2, 1, -2, -2))
    return FlipInstance(c, D, "mixed")


# ---------------------------------------------------------------------------
# The report stream


KINDS = ("cone", "circuit", "mixed")


def _combine(kind: str, reports: list, instance: dict, notes: list) -> CheckReport:
    verdicts = {}
    for r in reports:
        key = r.check
        k = 2
        while key in verdicts:
            key = f"{r.check}#{k}"
            k += 1
        verdicts[key] = r.verdict
    bad = [r.to_dict() for r in reports if r.verdict == VIOLATION]
    if bad:
        verdict = VIOLATION
        witnesses = bad + [{"instance": instance}]
    else:
        verdict = PASS if any(r.verdict == PASS for r in reports) else NOT_APPLICABLE
        witnesses = []
    return CheckReport(f"fuzz:{kind}", verdict, verdicts, witnesses,
                       io.fingerprint(instance), notes=notes)


def flip_reports(inst: FlipInstance, monotonicity: bool = True) -> list:
    c = inst.contraction
    out = []
    rec = d_flip(c, inst.divisor)
    problems = validate_qflip(rec)
    out.append(CheckReport("qflip", VIOLATION if any(problems.values()) else PASS,
                           {k: v for k, v in problems.items() if v}))
    out.append(check_lemma(rec))
    if monotonicity:
        out.append(check_monotonicity(rec))
    out.append(check_involution(rec))
    out.append(check_conj_mineq(c, inst.divisor if inst.kind == "flop" else None))
    if c.n == 3 and d_invariant(c)[0] == 1:
        out.append(check_length_bound(c))
    return out


def cone_reports(fan: Fan, boundary: tuple) -> list:
    pair = ToricPair(fan, boundary)
    out = [check_conj_mld(pair, tau) for tau in fan.all_cones if tau]
    out.append(check_borisov(fan))
    return out


def fuzz_instance(n: int, seed: int, index: int, budget: int = 50) -> CheckReport:
    rng = instance_rng(seed, index)
    kind = KINDS[index % len(KINDS)]
    notes = []
    for attempt in range(budget):
        try:
            if kind == "cone":
                if rng.random() < 0.6:
                    fan = random_simplicial_cone(n, rng)
                    boundary = random_boundary(len(fan.rays), rng)
                else:
                    # K + B must stay R-Cartier on a non simplicial cone
                    fan = random_gorenstein_cone(n, rng, box=1 if n > 3 else 2)
                    boundary = (Fraction(0),) * len(fan.rays)
                instance = io.pair_to_dict(ToricPair(fan, boundary))
                reports = cone_reports(fan, boundary)
            else:
                maker = random_circuit_flip if kind == "circuit" else random_mixed_flip
                inst = maker(n, rng)
                instance = inst.to_dict()
                reports = flip_reports(inst)
        except Degenerate:
            continue
        if attempt:
            notes.append(f"{attempt} degenerate draw(s) retried")
        return _combine(kind, reports, instance, notes)
    return CheckReport(f"fuzz:{kind}", NOT_APPLICABLE, notes=[f"budget of {budget} draws exhausted"])


def fuzz(n: int, count: int, seed: int = 0, budget: int = 50) -> Iterator[CheckReport]:
    """Stream of one combined report per random instance."""
    if not 2 <= n <= 5:
        raise ValueError("fuzz supports 2 <= n <= 5")
    for i in range(count):
        yield fuzz_instance(n, seed, i, budget)
