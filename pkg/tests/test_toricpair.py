from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SimplicialOracle
from toricflip import lattice as lat
from toricflip.errors import NotRCartier
from toricflip.fan import Fan
from toricflip.lab.fuzz import instance_rng, random_boundary, random_simplicial_cone
from toricflip.toricpair import (ToricPair, codim, is_canonical_in_codim, log_discrepancy, mld,
                                 mld_by_enumeration, pl_function)

ORTHANT = Fan(lat.identity(3), [(0, 1, 2)])
SQUARE = Fan([(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)], [(0, 1, 2, 3)])
HALF = Fan([(1, 0, 0), (0, 1, 0), (1, 1, 2)], [(0, 1, 2)])


def test_pl_function_examples():
    assert pl_function(ORTHANT, [0, 0, 0]).functionals == ((0, 0, 0),)
    assert pl_function(ORTHANT, [1, 1, 1]).functionals == ((1, 1, 1),)
    assert pl_function(SQUARE, [1, 1, 1, 1]).functionals == ((0, 0, 1),)
    with pytest.raises(NotRCartier):
        pl_function(SQUARE, [1, 0, 0, 0])


def test_log_discrepancy_examples():
    pair = ToricPair(ORTHANT)
    assert log_discrepancy(pair, (1, 1, 1)) == 3
    assert log_discrepancy(pair, (1, 0, 0)) == 1
    assert log_discrepancy(ToricPair(ORTHANT, [1, 0, 0]), (1, 0, 0)) == 0


def test_mld_examples():
    assert mld(ToricPair(ORTHANT), [(0, 1, 2)], exact=True) == (3, (1, 1, 1))
    value, witness = mld(ToricPair(SQUARE), [(0, 1, 2, 3)], exact=True)
    assert value == 2 and witness == (1, 1, 2)
    value, _ = mld(ToricPair(HALF), [(0, 1, 2)], exact=True)
    assert value == Fraction(3, 2)


def test_codim_examples():
    p2 = Fan([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
    assert codim(p2, ()) == 0
    assert codim(p2, (0,)) == 1
    assert codim(p2, (0, 1)) == 2


def test_homogeneity_and_ray_values():
    pair = ToricPair(HALF, [Fraction(1, 3), 0, Fraction(1, 2)])
    for i, r in enumerate(HALF.rays):
        assert log_discrepancy(pair, r) == 1 - pair.boundary[i]
    v = (1, 1, 1)
    assert pair.psi((3, 3, 3)) == 3 * pair.psi(v)


def test_mld_is_monotone_in_the_locus():
    pair = ToricPair(HALF)
    small, _ = mld(pair, [(0, 1, 2)])
    big, _ = mld(pair, [(0, 1), (2,)])
    assert big <= small


def test_canonical_predicates():
    assert is_canonical_in_codim(ToricPair(ORTHANT), 2, strict=True)
    assert is_canonical_in_codim(ToricPair(HALF), 2, strict=True)
    # the ordinary double point is terminal: mld 2 at the vertex
    assert is_canonical_in_codim(ToricPair(SQUARE), 2, strict=True)
    half_b = ToricPair(ORTHANT, [Fraction(1, 2), Fraction(1, 2), 0])
    assert is_canonical_in_codim(half_b, 2) and not is_canonical_in_codim(half_b, 2, strict=True)
    assert not is_canonical_in_codim(ToricPair(Fan([(1, 0), (1, 2)], [(0, 1)])), 2, strict=True)


def _draw(seed, n):
    rng = instance_rng(seed, n, "oracle")
    fan = random_simplicial_cone(n, rng, max_mult=8)
    if max(abs(x) for r in fan.rays for x in r) > 3:
        return None
    return fan, random_boundary(n, rng)


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_mld_agrees_with_box_scan(seed, n):
    drawn = _draw(seed, n)
    if drawn is None:
        return
    fan, b = drawn
    pair = ToricPair(fan, b)
    oracle = SimplicialOracle(fan.rays, fan.cones, b)
    for tau in fan.all_cones:
        if not tau:
            continue
        value, witness = mld(pair, [tau], exact=True)
        assert oracle.psi(witness) == value
        if max(abs(x) for x in witness) <= 6:
            assert oracle.box_mld([tau], True, 6) == value


@settings(max_examples=20)
@given(st.integers(0, 10 ** 6))
def test_mld_agrees_with_enumeration(seed):
    rng = instance_rng(seed, 0, "enum")
    fan = random_simplicial_cone(3, rng, max_mult=6)
    pair = ToricPair(fan, random_boundary(3, rng))
    for tau in fan.all_cones:
        if tau:
            for exact in (True, False):
                assert mld(pair, [tau], exact)[0] == mld_by_enumeration(pair, [tau], exact)[0]
