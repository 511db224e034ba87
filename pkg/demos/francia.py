"""Walk through the Francia flip: a smooth threefold with a (-1, -2) curve.

Run with ``python3 demos/francia.py``.
"""

from toricflip import d_flip, length, mld
from toricflip.contraction import d_invariant, mld_in_exceptional_locus
from toricflip.fan import is_smooth
from toricflip.lab.catalog import francia

entry = francia()
c = entry.contraction
print("rays of X:", c.fine.rays)
print("cones of X:", c.fine.cones)

d_min, d_max, pure = d_invariant(c)
a, witness = mld_in_exceptional_locus(c)
print(f"the flipping curve has dimension {d_min}; a(X, E) = {a} at {witness}")
print(f"length of the contraction: {length(c)}")

rec = d_flip(c, c.pair.k_plus_b)
tgt = rec.target.fine
print("\nafter the flip")
print("cones of X+:", tgt.cones)
for t in rec.transform_E:
    print(f"  transform of E: V{list(t)}, codim {tgt.cone_dim(t)}, smooth: {is_smooth(tgt, t)}")

# the valuation that computed a(X, E) on X gets a larger log discrepancy on X+
print(f"  psi at {witness}: {rec.source.pair.psi(witness)} on X, "
      f"{rec.target.pair.psi(witness)} on X+")
value, w = mld(rec.target.pair, rec.transform_E, exact=False)
print(f"  mld over the transform of E on X+: {value} at {w}")
