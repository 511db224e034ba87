"""Exact integer and rational linear algebra on the lattice N = Z^n.

Vectors are tuples of Python ints and matrices are tuples of row tuples, so
everything is hashable, immutable and arbitrary precision.  Rational scalars
are :class:`fractions.Fraction`.  No floating point is used anywhere.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import NotPointed, ZeroVector

Rational = Fraction
Vector = tuple
Matrix = tuple


def as_vector(v: Iterable[int]) -> Vector:
    return tuple(int(x) for x in v)


def as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(as_vector(r) for r in rows)


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, an int or a Fraction.  Floats are refused."""
    if isinstance(text, float):
        raise TypeError("floats are not accepted as exact rationals")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {text!r}") from None


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(k, v):
    return tuple(k * a for a in v)


def vec_sum(vectors: Iterable[Sequence], dim: int):
    total = [0] * dim
    for v in vectors:
        for i, x in enumerate(v):
            total[i] += x
    return tuple(total)


def transpose(m: Sequence[Sequence]) -> Matrix:
    return tuple(zip(*m)) if m else ()


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def mat_vec(a: Sequence[Sequence], v: Sequence):
    return tuple(dot(row, v) for row in a)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def content(v: Sequence[int]) -> int:
    return math.gcd(*v) if len(v) else 0


def primitive(v: Sequence[int]) -> Vector:
    """Divide an integer vector by the gcd of its coordinates.

    >>> primitive((2, 4, 6))
    (1, 2, 3)
    >>> primitive((0, 0, -4))
    (0, 0, -1)
    """
    v = as_vector(v)
    g = content(v)
    if g == 0:
        raise ZeroVector("the zero vector has no primitive generator")
    return tuple(x // g for x in v)


def is_primitive(v: Sequence[int]) -> bool:
    return content(v) == 1


def primitive_rational(v: Sequence) -> Vector:
    """Primitive integer vector on the ray through a rational vector."""
    den = math.lcm(*(Fraction(x).denominator for x in v))
    return primitive(tuple(int(Fraction(x) * den) for x in v))


# ---------------------------------------------------------------------------
# Determinants, ranks and rational solving


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def row_echelon(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return a, []
    ncols = len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(row_echelon(rows)[1]) if rows else 0


def solve_rational(a: Sequence[Sequence], b: Sequence):
    """One rational solution x of ``a x = b``, or None when inconsistent.

    Free variables are set to zero, so the result is deterministic.
    """
    if not a:
        return None if any(b) else ()
    ncols = len(a[0])
    aug = [list(r) + [rhs] for r, rhs in zip(a, b)]
    red, pivots = row_echelon(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, c in zip(red, pivots):
        x[c] = row[-1]
    return tuple(x)


# ---------------------------------------------------------------------------
# Hermite normal form and kernels


def hermite_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form with unimodular transform.

    Returns ``(H, U)`` with ``H = U @ M``.  ``H`` is in row echelon form,
    pivots are positive, entries above a pivot lie in ``[0, pivot)`` and the
    zero rows come last.
    """
    m = as_matrix(m)
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    h = [list(r) for r in m]
    u = [list(r) for r in identity(nrows)]

    def combine(i, j, a, b, c, d):
        # (row_i, row_j) <- (a*row_i + b*row_j, c*row_i + d*row_j); ad - bc = +-1
        hi, hj, ui, uj = h[i], h[j], u[i], u[j]
        h[i] = [a * x + b * y for x, y in zip(hi, hj)]
        h[j] = [c * x + d * y for x, y in zip(hi, hj)]
        u[i] = [a * x + b * y for x, y in zip(ui, uj)]
        u[j] = [c * x + d * y for x, y in zip(ui, uj)]

    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        for i in range(r + 1, nrows):
            if h[i][c] == 0:
                continue
            x, y = h[r][c], h[i][c]
            g, s, t = _ext_gcd(x, y)
            combine(r, i, s, t, -y // g, x // g)
        if h[r][c] == 0:
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        p = h[r][c]
        for i in range(r):
            q = h[i][c] // p
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return as_matrix(h), as_matrix(u)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b) > 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def kernel_basis(m: Sequence[Sequence[int]], ncols: int | None = None) -> list[Vector]:
    """Lattice basis of the saturated integer kernel ``{v : M v = 0}``."""
    m = as_matrix(m)
    if ncols is None:
        if not m:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(m[0])
    if not m:
        return list(identity(ncols))
    h, u = hermite_normal_form(transpose(m))
    return [u[i] for i in range(ncols) if not any(h[i])]


def saturation_basis(vectors: Sequence[Sequence[int]], dim: int) -> list[Vector]:
    """Basis of (Q-span of vectors) intersected with Z^dim."""
    if not vectors:
        return []
    perp = kernel_basis(vectors, dim)
    if not perp:
        return list(identity(dim))
    return kernel_basis(perp, dim)


def multiplicity(vectors: Sequence[Sequence[int]]) -> int:
    """Index of the sublattice generated by linearly independent vectors
    inside its saturation (gcd of the maximal minors).  Zero if dependent."""
    vectors = as_matrix(vectors)
    k = len(vectors)
    if k == 0:
        return 1
    n = len(vectors[0])
    g = 0
    for cols in itertools.combinations(range(n), k):
        g = math.gcd(g, determinant([[v[c] for c in cols] for v in vectors]))
        if g == 1:
            return 1
    return g


def is_unimodular_system(vectors: Sequence[Sequence[int]]) -> bool:
    """True iff the vectors are independent and extend to a Z-basis."""
    return multiplicity(vectors) == 1


# ---------------------------------------------------------------------------
# Cones


@lru_cache(maxsize=None)
def _cone_description(gens: Matrix, dim: int) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
    if not gens:
        return (), tuple(identity(dim))
    equations = tuple(kernel_basis(gens, dim))
    k = dim - len(equations)
    facets = set()
    if k == 1:
        u = _orient(_lineal_normal([], equations, dim), gens)
        if u is None:
            raise NotPointed("a line is not a pointed cone")
        facets.add(u)
    else:
        for subset in itertools.combinations(range(len(gens)), k - 1):
            rows = [gens[i] for i in subset]
            if rank(rows) != k - 1:
                continue
            u = _orient(_lineal_normal(rows, equations, dim), gens)
            if u is not None:
                facets.add(u)
    facets = tuple(sorted(facets))
    if rank(list(facets) + list(equations)) != dim:
        raise NotPointed("cone contains a line", generators=gens)
    return facets, equations


def _lineal_normal(rows, equations, dim):
    ker = kernel_basis(list(rows) + list(equations), dim)
    if len(ker) != 1:
        return None
    return ker[0]


def _orient(u, gens):
    if u is None:
        return None
    vals = [dot(u, g) for g in gens]
    if all(x >= 0 for x in vals):
        return primitive(u)
    if all(x <= 0 for x in vals):
        return primitive(tuple(-x for x in u))
    return None


def cone_description(generators: Iterable[Sequence[int]], dim: int | None = None):
    """(facet normals, equations) of the cone spanned by the generators.

    Facet normals are primitive inner normals relative to the linear span;
    equations form a lattice basis of the orthogonal complement of the span.
    """
    gens = tuple(sorted(set(as_matrix(generators))))
    if dim is None:
        dim = len(gens[0])
    return _cone_description(gens, dim)


def facet_normals(generators: Iterable[Sequence[int]], dim: int | None = None) -> list[Vector]:
    """Irredundant inequality description of a pointed cone.

    Returns primitive vectors ``u`` with cone = {x : <u, x> >= 0 for all u}.
    For a cone that is not full dimensional each equation of its span appears
    as the pair ``+e, -e``.
    """
    facets, equations = cone_description(generators, dim)
    out = list(facets)
    for e in equations:
        out.append(e)
        out.append(tuple(-x for x in e))
    return out


def in_cone(x: Sequence, generators, dim: int | None = None) -> bool:
    facets, equations = cone_description(generators, dim)
    return all(dot(u, x) >= 0 for u in facets) and all(dot(e, x) == 0 for e in equations)


def in_relative_interior(x: Sequence, generators, dim: int | None = None) -> bool:
    facets, equations = cone_description(generators, dim)
    return all(dot(u, x) > 0 for u in facets) and all(dot(e, x) == 0 for e in equations)


# ---------------------------------------------------------------------------
# Lattice points


def enumerate_points(inequalities: Sequence[tuple[Sequence[int], object]], box_bound: int,
                     dim: int | None = None) -> list[Vector]:
    """All integer x in [-box_bound, box_bound]^n with <u, x> >= c for every (u, c).

    Coordinates are fixed one at a time; each inequality bounds the current
    coordinate using the box for the coordinates not yet fixed.
    """
    ineqs = [(as_vector(u), Fraction(c)) for u, c in inequalities]
    if dim is None:
        if not ineqs:
            raise ValueError("dimension needed without inequalities")
        dim = len(ineqs[0][0])
    B = int(box_bound)
    suffix = [[0] * (dim + 1) for _ in ineqs]
    for j, (u, _) in enumerate(ineqs):
        for i in range(dim - 1, -1, -1):
            suffix[j][i] = suffix[j][i + 1] + abs(u[i]) * B
    out = []
    point = [0] * dim

    def rec(k, partial):
        lo, hi = -B, B
        for j, (u, c) in enumerate(ineqs):
            need = c - partial[j] - suffix[j][k + 1]
            a = u[k]
            if a > 0:
                lo = max(lo, math.ceil(need / a))
            elif a < 0:
                hi = min(hi, math.floor(need / a))
            elif need > 0:
                return
        for x in range(lo, hi + 1):
            point[k] = x
            nxt = [p + u[k] * x for p, (u, _) in zip(partial, ineqs)]
            if k == dim - 1:
                out.append(tuple(point))
            else:
                rec(k + 1, nxt)

    rec(0, [Fraction(0)] * len(ineqs))
    return out


def parallelepiped_points(rays: Sequence[Sequence[int]]) -> list[tuple[Vector, tuple[Fraction, ...]]]:
    """Lattice points of the half-open parallelepiped of independent rays.

    Returns pairs ``(p, lam)`` with ``p = sum lam_i * ray_i``, every
    ``lam_i`` in [0, 1).  There are exactly ``multiplicity(rays)`` of them,
    and every lattice point of the cone is uniquely ``p + sum k_i ray_i``
    with nonnegative integers ``k_i``.
    """
    return list(_parallelepiped(as_matrix(rays)))


@lru_cache(maxsize=4096)
def _parallelepiped(rays: Matrix):
    k = len(rays)
    if k == 0:
        return ((), ()),
    dim = len(rays[0])
    basis = saturation_basis(rays, dim)
    # coordinates of the rays in the saturated basis
    bt = transpose(basis)
    coords = []
    for r in rays:
        x = solve_rational(bt, r)
        coords.append(tuple(int(c) for c in x))
    h, _ = hermite_normal_form(coords)
    diag = [next(x for x in row if x) for row in h]
    ct = transpose(coords)
    out = []
    for rep in itertools.product(*(range(d) for d in diag)):
        # rep is written in the coordinates of h's pivot columns (upper triangular)
        lam = solve_rational(ct, rep)
        frac = tuple(x - math.floor(x) for x in lam)
        p = tuple(sum(f * r[i] for f, r in zip(frac, rays)) for i in range(dim))
        out.append((tuple(int(x) for x in p), frac))
    return tuple(out)


def simplicial_cone_points(rays: Sequence[Sequence[int]], weights: Sequence, budget,
                           zero_cap: int = 0):
    """Lattice points v = sum lam_i ray_i of a simplicial cone with
    sum lam_i * weights_i <= budget.

    Weights must be nonnegative.  A ray of weight zero would make the region
    unbounded; its integral coefficient is then capped at ``zero_cap``.
    Yields ``(v, lam)``.
    """
    rays = as_matrix(rays)
    weights = [Fraction(w) for w in weights]
    budget = Fraction(budget)
    if any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative")
    k = len(rays)
    dim = len(rays[0])
    for p, lam in _parallelepiped(rays):
        base = sum(l * w for l, w in zip(lam, weights))
        if base > budget:
            continue
        counts = [0] * k

        def rec(i, value):
            if i == k:
                coeff = tuple(l + c for l, c in zip(lam, counts))
                v = tuple(p[j] + sum(c * r[j] for c, r in zip(counts, rays)) for j in range(dim))
                yield v, coeff
                return
            w = weights[i]
            top = zero_cap if w == 0 else int((budget - value) // w)
            for c in range(top + 1):
                counts[i] = c
                yield from rec(i + 1, value + c * w)
            counts[i] = 0

        yield from rec(0, base)


# ---------------------------------------------------------------------------
# Exact linear feasibility


def feasible_point(inequalities: Sequence[tuple[Sequence, object]],
                   equations: Sequence[tuple[Sequence, object]] = (),
                   dim: int | None = None):
    """A rational point x with <a, x> >= b and <e, x> = f, or None.

    Phase one of the simplex method over Q with Bland's rule.
    """
    rows_in = [(tuple(Fraction(x) for x in a), Fraction(b), False) for a, b in inequalities]
    rows_in += [(tuple(Fraction(x) for x in a), Fraction(b), True) for a, b in equations]
    if dim is None:
        if not rows_in:
            raise ValueError("dimension needed without constraints")
        dim = len(rows_in[0][0])
    if not rows_in:
        return (Fraction(0),) * dim
    m = len(rows_in)
    n_slack = sum(1 for *_, eq in rows_in if not eq)
    n_struct = 2 * dim + n_slack
    ncols = n_struct + m
    tab = []
    slack = 0
    for i, (a, b, eq) in enumerate(rows_in):
        row = list(a) + [-x for x in a] + [Fraction(0)] * n_slack + [Fraction(0)] * m + [b]
        if not eq:
            row[2 * dim + slack] = Fraction(-1)
            slack += 1
        if b < 0:
            row = [-x for x in row]
        row[n_struct + i] = Fraction(1)
        tab.append(row)
    basis = [n_struct + i for i in range(m)]
    obj = [Fraction(0)] * (ncols + 1)
    for j in range(n_struct):
        obj[j] = -sum(r[j] for r in tab)
    obj[-1] = -sum(r[-1] for r in tab)

    while True:
        enter = next((j for j in range(ncols) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, r in enumerate(tab):
            if r[enter] > 0:
                ratio = r[-1] / r[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # unbounded: cannot happen in phase one
            break
        i = best[1]
        piv = tab[i][enter]
        tab[i] = [x / piv for x in tab[i]]
        for r_idx, r in enumerate(tab):
            if r_idx != i and r[enter] != 0:
                f = r[enter]
                tab[r_idx] = [x - f * y for x, y in zip(r, tab[i])]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, tab[i])]
        basis[i] = enter
    if obj[-1] != 0:
        return None
    values = [Fraction(0)] * ncols
    for i, j in enumerate(basis):
        values[j] = tab[i][-1]
    return tuple(values[j] - values[dim + j] for j in range(dim))


def in_cone_lp(x: Sequence, generators: Sequence[Sequence[int]]) -> bool:
    """Cone membership by feasibility of x = sum lam_i g_i, lam >= 0."""
    gens = as_matrix(generators)
    if not gens:
        return not any(x)
    k = len(gens)
    ineqs = [(tuple(int(i == j) for j in range(k)), 0) for i in range(k)]
    eqs = [(tuple(g[row] for g in gens), x[row]) for row in range(len(x))]
    return feasible_point(ineqs, eqs, k) is not None


def cone_from_inequalities(normals: Sequence[Sequence[int]], equations: Sequence[Sequence[int]],
                           dim: int) -> list[Vector]:
    """Extreme rays of the pointed cone {x : <u, x> >= 0, <e, x> = 0}.

    Incremental double description with the algebraic adjacency test.
    """
    space = kernel_basis(equations, dim) if equations else list(identity(dim))
    k = len(space)
    if k == 0:
        return []
    st = transpose(space)  # x = st @ y
    rows = [tuple(dot(u, col) for col in space) for u in normals]
    rows = [r for r in rows if any(r)]
    if rank(rows) < k:
        raise NotPointed("inequalities do not cut out a pointed cone")
    # initial simplicial cone from k independent inequalities
    chosen = []
    for i, r in enumerate(rows):
        if rank([rows[j] for j in chosen] + [r]) > len(chosen):
            chosen.append(i)
        if len(chosen) == k:
            break
    base = [rows[i] for i in chosen]
    ys = []
    for j in range(k):
        e = [0] * k
        e[j] = 1
        ys.append(primitive_rational(solve_rational(base, e)))
    processed = list(chosen)
    for i, a in enumerate(rows):
        if i in chosen:
            continue
        vals = [dot(a, y) for y in ys]
        pos = [y for y, v in zip(ys, vals) if v > 0]
        zero = [y for y, v in zip(ys, vals) if v == 0]
        neg = [(y, v) for y, v in zip(ys, vals) if v < 0]
        new = pos + zero
        for p in pos:
            ap = dot(a, p)
            tight_p = {j for j in processed if dot(rows[j], p) == 0}
            for nvec, an in neg:
                common = [rows[j] for j in tight_p if dot(rows[j], nvec) == 0]
                if k > 2 and rank(common) < k - 2:
                    continue
                if k == 2 and common:
                    continue
                comb = tuple(ap * x - an * y for x, y in zip(nvec, p))
                new.append(primitive(comb))
        processed.append(i)
        ys = sorted(set(new))
    out = set()
    for y in ys:
        x = tuple(dot(row, y) for row in st)
        out.add(primitive(x))
    return sorted(out)


def intersect_cones(gens_a: Sequence[Sequence[int]], gens_b: Sequence[Sequence[int]],
                    dim: int) -> list[Vector]:
    """Extreme rays of the intersection of two pointed cones."""
    fa, ea = cone_description(gens_a, dim)
    fb, eb = cone_description(gens_b, dim)
    eqs = list(ea) + list(eb)
    if eqs and rank(eqs) == dim:
        return []
    try:
        return cone_from_inequalities(list(fa) + list(fb), eqs, dim)
    except NotPointed:
        # the intersection is the zero cone
        return []
