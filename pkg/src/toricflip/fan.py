"""Fans, their face structure and refinement relations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from . import lattice as lat
from .errors import InvalidFan, NotPointed, OutsideSupport, SupportMismatch, UnknownCone

Cone = tuple  # sorted tuple of ray indices


def make_cone(indices: Iterable[int]) -> Cone:
    return tuple(sorted(set(int(i) for i in indices)))


class Fan:
    """A fan in N = Z^dim stored by its rays and maximal cones.

    Cones are sorted tuples of indices into ``rays``; the zero cone is ``()``.
    Faces are computed on demand and cached on the instance.
    """

    def __init__(self, rays: Sequence[Sequence[int]], cones: Sequence[Iterable[int]],
                 dim: int | None = None):
        rays = lat.as_matrix(rays)
        if dim is None:
            if not rays:
                raise InvalidFan("dimension required for a fan without rays")
            dim = len(rays[0])
        self.dim = int(dim)
        self.rays = rays
        self.cones = tuple(make_cone(c) for c in cones)

    def __repr__(self):
        return f"Fan(dim={self.dim}, rays={list(self.rays)}, cones={list(self.cones)})"

    def __eq__(self, other):
        if not isinstance(other, Fan):
            return NotImplemented
        return self.dim == other.dim and self.cone_set() == other.cone_set()

    def __hash__(self):
        return hash((self.dim, frozenset(self.cone_set())))

    def cone_set(self) -> set:
        """Maximal cones as frozensets of ray vectors (index independent)."""
        return {frozenset(self.rays[i] for i in c) for c in self.cones}

    # -- basic geometry -------------------------------------------------

    def generators(self, cone: Cone) -> tuple:
        return tuple(self.rays[i] for i in cone)

    def cone_dim(self, cone: Cone) -> int:
        cache = self.__dict__.setdefault("_dim_cache", {})
        cone = tuple(cone)
        if cone not in cache:
            cache[cone] = lat.rank(self.generators(cone)) if cone else 0
        return cache[cone]

    def is_simplicial_cone(self, cone: Cone) -> bool:
        return self.cone_dim(cone) == len(cone)

    @cached_property
    def is_simplicial(self) -> bool:
        return all(self.is_simplicial_cone(c) for c in self.cones)

    @cached_property
    def is_pure(self) -> bool:
        return all(self.cone_dim(c) == self.dim for c in self.cones)

    def description(self, cone: Cone):
        """(facet normals, equations) of a cone, cached per instance."""
        cache = self.__dict__.setdefault("_description_cache", {})
        cone = tuple(cone)
        if cone not in cache:
            cache[cone] = lat.cone_description(self.generators(cone), self.dim)
        return cache[cone]

    def cone_faces(self, cone: Cone) -> set:
        """All faces of one cone, including the cone and the zero cone."""
        return set(self._faces_of(make_cone(cone)))

    def _faces_of(self, cone: Cone) -> frozenset:
        cache = self.__dict__.setdefault("_face_cache", {})
        if cone in cache:
            return cache[cone]
        if self.is_simplicial_cone(cone):
            out = frozenset(make_cone(s) for k in range(len(cone) + 1)
                            for s in itertools.combinations(cone, k))
        else:
            facets, _ = self.description(cone)
            out = {cone}
            frontier = [cone]
            while frontier:
                nxt = []
                for f in frontier:
                    fd = self.cone_dim(f)
                    if fd == 0:
                        continue
                    for u in facets:
                        g = make_cone(i for i in f if lat.dot(u, self.rays[i]) == 0)
                        if g != f and g not in out and self.cone_dim(g) == fd - 1:
                            out.add(g)
                            nxt.append(g)
                frontier = nxt
            out.add(())
            out = frozenset(out)
        cache[cone] = out
        return out

    @cached_property
    def all_cones(self) -> tuple:
        out = set()
        for c in self.cones:
            out |= self._faces_of(c)
        return tuple(sorted(out, key=lambda c: (len(c), c)))

    def cones_of_dim(self, k: int) -> list:
        return [c for c in self.all_cones if self.cone_dim(c) == k]

    def has_cone(self, cone: Iterable[int]) -> bool:
        return make_cone(cone) in set(self.all_cones)

    def star(self, cone: Cone) -> list:
        """Cones of the fan having ``cone`` as a face."""
        s = set(cone)
        return [c for c in self.all_cones if s <= set(c)]

    def maximal_cones_containing(self, cone: Cone) -> list:
        s = set(cone)
        return [i for i, c in enumerate(self.cones) if s <= set(c)]

    def interior_point(self, cone: Cone) -> tuple:
        return lat.vec_sum(self.generators(cone), self.dim)

    def ray_index(self, v: Sequence[int]) -> int:
        return self.rays.index(tuple(v))

    # -- point location ---------------------------------------------------

    def minimal_containing_cone(self, v: Sequence[int]) -> Cone:
        """The cone whose relative interior contains v."""
        v = tuple(v)
        if not any(v):
            return ()
        for c in self.cones:
            facets, eqs = self.description(c)
            if any(lat.dot(e, v) for e in eqs):
                continue
            if any(lat.dot(u, v) < 0 for u in facets):
                continue
            return self._face_at(c, facets, v)
        raise OutsideSupport(f"{v} is not in the support of the fan", vector=v)

    def _face_at(self, cone: Cone, facets, v) -> Cone:
        tight = [u for u in facets if lat.dot(u, v) == 0]
        return make_cone(i for i in cone if all(lat.dot(u, self.rays[i]) == 0 for u in tight))

    def face_containing(self, cone: Cone, v: Sequence[int]) -> Cone:
        """Face of ``cone`` with v in its relative interior; v must lie in ``cone``."""
        if not any(v):
            return ()
        return self._face_at(cone, self.description(cone)[0], v)

    def contains(self, v: Sequence[int]) -> bool:
        try:
            self.minimal_containing_cone(v)
        except OutsideSupport:
            return False
        return True

    # -- adjacency --------------------------------------------------------

    @cached_property
    def codim_one_faces(self) -> dict:
        """Map each codimension-one face of a maximal cone to the indices of
        the maximal cones containing it (full dimensional fans)."""
        out = {}
        for i, c in enumerate(self.cones):
            d = self.cone_dim(c)
            for f in self._faces_of(c):
                if self.cone_dim(f) == d - 1:
                    out.setdefault(f, []).append(i)
        return out


# ---------------------------------------------------------------------------
# Validation


def validate(fan: Fan) -> list[str]:
    """Diagnostics for a fan; the empty list means the fan is valid.

    Codes: ``NonPrimitiveRay(k)``, ``DuplicateRay(k,l)``, ``UnusedRay(k)``,
    ``NotPointed(i)``, ``RedundantRay(i,k)`` and ``NotAFace(i,j)``.
    """
    diags = []
    for k, r in enumerate(fan.rays):
        if len(r) != fan.dim:
            diags.append(f"BadDimension({k})")
            return diags
        if not lat.is_primitive(r):
            diags.append(f"NonPrimitiveRay({k})")
    seen = {}
    for k, r in enumerate(fan.rays):
        if r in seen:
            diags.append(f"DuplicateRay({seen[r]},{k})")
        else:
            seen[r] = k
    used = set(itertools.chain.from_iterable(fan.cones))
    for k in range(len(fan.rays)):
        if k not in used:
            diags.append(f"UnusedRay({k})")
    for i in used:
        if not 0 <= i < len(fan.rays):
            diags.append(f"UnknownRay({i})")
    if diags:
        return diags
    for i, c in enumerate(fan.cones):
        try:
            facets, eqs = fan.description(c)
        except NotPointed:
            diags.append(f"NotPointed({i})")
            continue
        for k in c:
            r = fan.rays[k]
            tight = [u for u in facets if lat.dot(u, r) == 0]
            if lat.rank(list(tight) + list(eqs)) < fan.dim - 1:
                diags.append(f"RedundantRay({i},{k})")
    if diags:
        return diags
    for i, j in itertools.combinations(range(len(fan.cones)), 2):
        if not _meet_in_common_face(fan, fan.cones[i], fan.cones[j]):
            diags.append(f"NotAFace({i},{j})")
            return diags
    return diags


def _meet_in_common_face(fan: Fan, a: Cone, b: Cone) -> bool:
    # separation lemma: a and b meet in a common face iff some u is positive on
    # a \ b, negative on b \ a and zero on the shared rays
    shared = set(a) & set(b)
    ineqs = [(fan.rays[k], 1) for k in a if k not in shared]
    ineqs += [(tuple(-x for x in fan.rays[k]), 1) for k in b if k not in shared]
    eqs = [(fan.rays[k], 0) for k in shared]
    if set(a) == set(b):
        return True
    return lat.feasible_point(ineqs, eqs, fan.dim) is not None


def check(fan: Fan) -> Fan:
    diags = validate(fan)
    if diags:
        raise InvalidFan("; ".join(diags), diagnostics=diags)
    return fan


def is_smooth(fan: Fan, cone: Iterable[int]) -> bool:
    """True iff the generators of the cone extend to a basis of Z^n."""
    cone = make_cone(cone)
    if not fan.has_cone(cone):
        raise UnknownCone(f"{cone} is not a cone of the fan", cone=cone)
    if not cone:
        return True
    gens = fan.generators(cone)
    return len(gens) == fan.cone_dim(cone) and lat.is_unimodular_system(gens)


def cone_multiplicity(fan: Fan, cone: Iterable[int]) -> int:
    gens = fan.generators(make_cone(cone))
    return lat.multiplicity(gens)


def minimal_containing_cone(fan: Fan, v: Sequence[int]) -> Cone:
    return fan.minimal_containing_cone(v)


def pulling_triangulation(fan: Fan, cone: Cone) -> list[Cone]:
    """Triangulate a cone of the fan without new rays, pulling the smallest
    ray index first.  The result is consistent on shared faces because the
    pulling order is global."""
    cone = make_cone(cone)
    if fan.is_simplicial_cone(cone):
        return [cone]
    apex = cone[0]
    d = fan.cone_dim(cone)
    out = []
    for f in sorted(fan.cone_faces(cone)):
        if apex in f or fan.cone_dim(f) != d - 1:
            continue
        for simplex in pulling_triangulation(fan, f):
            out.append(make_cone(simplex + (apex,)))
    return sorted(out)


# ---------------------------------------------------------------------------
# Refinements


@dataclass(frozen=True)
class Refinement:
    """A pair of fans with the same support, ``fine`` subdividing ``coarse``.

    ``assignment[i]`` is the index of the coarse maximal cone containing fine
    maximal cone ``i``.
    """

    fine: Fan
    coarse: Fan
    assignment: tuple = field(default=None)

    def __post_init__(self):
        if self.assignment is None:
            object.__setattr__(self, "assignment", _assign(self.fine, self.coarse))
        else:
            object.__setattr__(self, "assignment", tuple(self.assignment))

    def coarse_cone_of(self, cone: Cone) -> Cone:
        """Minimal coarse cone containing the relative interior of a fine cone."""
        return self.coarse.minimal_containing_cone(self.fine.interior_point(cone))

    def fine_cones_in(self, coarse_index: int) -> list:
        return [self.fine.cones[i] for i, a in enumerate(self.assignment) if a == coarse_index]

    @cached_property
    def is_small(self) -> bool:
        return set(self.fine.rays) == set(self.coarse.rays)


def _assign(fine: Fan, coarse: Fan) -> tuple:
    out = []
    for i, c in enumerate(fine.cones):
        gens = fine.generators(c)
        hit = None
        for j, d in enumerate(coarse.cones):
            if all(lat.in_cone(g, coarse.generators(d), coarse.dim) for g in gens):
                hit = j
                break
        if hit is None:
            raise SupportMismatch(f"fine cone {i} lies in no coarse cone", cone=c)
        out.append(hit)
    return tuple(out)


def validate_refinement(ref: Refinement) -> list[str]:
    """Diagnostics for a refinement: both fans valid, each fine cone inside its
    coarse cone and every coarse cone covered by its fine cones."""
    diags = [f"fine:{d}" for d in validate(ref.fine)]
    diags += [f"coarse:{d}" for d in validate(ref.coarse)]
    if diags:
        return diags
    fine, coarse = ref.fine, ref.coarse
    for i, (c, j) in enumerate(zip(fine.cones, ref.assignment)):
        gens = coarse.generators(coarse.cones[j])
        if not all(lat.in_cone(g, gens, fine.dim) for g in fine.generators(c)):
            diags.append(f"NotContained({i},{j})")
    if diags:
        return diags
    for j, d in enumerate(coarse.cones):
        if not _covers(ref, j):
            diags.append(f"SupportMismatch({j})")
    return diags


def _covers(ref: Refinement, j: int) -> bool:
    # Fine cones in a convex coarse cone cover it iff no codim-one face of a
    # fine cone is exposed in the relative interior of the coarse cone.
    fine, coarse = ref.fine, ref.coarse
    d = coarse.cones[j]
    ddim = coarse.cone_dim(d)
    members = [i for i, a in enumerate(ref.assignment) if a == j]
    if not members:
        return False
    if any(fine.cone_dim(fine.cones[i]) != ddim for i in members):
        return False
    counts = {}
    for i in members:
        c = fine.cones[i]
        for f in fine._faces_of(c):
            if fine.cone_dim(f) == ddim - 1:
                counts[f] = counts.get(f, 0) + 1
    dgens = coarse.generators(d)
    facets, _ = lat.cone_description(dgens, coarse.dim)
    for f, cnt in counts.items():
        p = fine.interior_point(f)
        on_boundary = any(lat.dot(u, p) == 0 for u in facets)
        if on_boundary:
            if cnt != 1:
                return False
        elif cnt != 2:
            return False
    return True


def check_refinement(ref: Refinement) -> Refinement:
    diags = validate_refinement(ref)
    if diags:
        raise InvalidFan("; ".join(diags), diagnostics=diags)
    return ref


def walls(ref: Refinement) -> list[tuple[Cone, Cone, Cone]]:
    """Codimension-one cones of the fine fan interior to a coarse cone.

    Returns ``(wall, left, right)`` with ``left`` and ``right`` the two
    adjacent maximal cones of the fine fan.
    """
    fine = ref.fine
    out = []
    for f, owners in sorted(fine.codim_one_faces.items()):
        if fine.cone_dim(f) != fine.dim - 1:
            continue
        interior = ref.coarse.cone_dim(ref.coarse_cone_of(f)) == fine.dim
        if not interior:
            continue
        if len(owners) != 2:
            raise SupportMismatch(f"interior wall {f} has {len(owners)} adjacent cones", wall=f)
        out.append((f, fine.cones[owners[0]], fine.cones[owners[1]]))
    return out


def common_refinement(a: Fan, b: Fan) -> Fan:
    """The fan of all intersections of maximal cones of ``a`` and ``b``."""
    if a.dim != b.dim:
        raise SupportMismatch("fans of different dimension")
    cells = set()
    for ca in a.cones:
        for cb in b.cones:
            rays = lat.intersect_cones(a.generators(ca), b.generators(cb), a.dim)
            if rays and lat.rank(rays) == max(a.cone_dim(ca), b.cone_dim(cb)):
                cells.add(frozenset(rays))
    if not cells:
        raise SupportMismatch("fans have disjoint supports")
    rays = sorted(set().union(*cells))
    index = {r: i for i, r in enumerate(rays)}
    cones = sorted(make_cone(index[r] for r in cell) for cell in cells)
    out = Fan(rays, cones, a.dim)
    if not (_same_support(out, a) and _same_support(out, b)):
        raise SupportMismatch("fans do not have the same support")
    return out


def _same_support(fine: Fan, coarse: Fan) -> bool:
    try:
        ref = Refinement(fine, coarse)
    except SupportMismatch:
        return False
    return all(_covers(ref, j) for j in range(len(coarse.cones)))


def refines(fine: Fan, coarse: Fan) -> bool:
    return _same_support(fine, coarse)


def lattice_isomorphism(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]):
    """A unimodular matrix g with g(set a) = set b, or None.

    Brute force over images of a fixed linearly independent subset of ``a``;
    intended for the small ray sets of a single cone.
    """
    a = lat.as_matrix(a)
    b = lat.as_matrix(b)
    if len(a) != len(b) or not a:
        return None if (a or b) else ()
    n = len(a[0])
    basis = []
    for v in a:
        if lat.rank(basis + [v]) > len(basis):
            basis.append(v)
    if len(basis) != n:
        raise ValueError("lattice_isomorphism needs full dimensional ray sets")
    target = set(b)
    for images in itertools.permutations(b, n):
        # g @ basis_j = images_j  =>  g = images^T @ (basis^T)^-1
        g_rows = []
        ok = True
        for row in range(n):
            sol = lat.solve_rational(basis, [img[row] for img in images])
            if sol is None or any(x.denominator != 1 for x in sol):
                ok = False
                break
            g_rows.append(tuple(int(x) for x in sol))
        if not ok:
            continue
        if abs(lat.determinant(g_rows)) != 1:
            continue
        if {lat.mat_vec(g_rows, v) for v in a} == target:
            return tuple(g_rows)
    return None
