"""The generalized Atiyah flops: E = P^d inside a (2d+1)-fold.

Each one sits on the boundary of the inequality d >= ceil(a - 1), and the
flop exchanges the two P^d's by a lattice symmetry.
"""

import sys

from toricflip import d_flip, length
from toricflip import lattice as lat
from toricflip.contraction import d_invariant, mld_in_exceptional_locus
from toricflip.fan import Fan
from toricflip.lab.catalog import generalized_atiyah
from toricflip.lab.checks import check_conj_mineq

top = int(sys.argv[1]) if len(sys.argv) > 1 else 3
print(" d  n   a  l  +c  symmetric  mineq")
for d in range(1, top + 1):
    g = generalized_atiyah(d)
    c = g.contraction
    a = mld_in_exceptional_locus(c)[0]
    rec = d_flip(c, g.flip_divisor)
    moved = Fan([lat.mat_vec(g.symmetry, r) for r in rec.target.fine.rays], rec.target.fine.cones)
    verdict = check_conj_mineq(c, g.flip_divisor)
    print(f"{d:2} {c.n:2} {str(a):>3} {str(length(c)):>2} {rec.c_plus_min:3}  "
          f"{str(moved == rec.source.fine):9}  {verdict.verdict}")
    assert d_invariant(c) == (d, d, True)
