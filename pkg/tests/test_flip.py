from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from toricflip import lattice as lat
from toricflip.contraction import d_invariant, make_contraction, wall_intersection
from toricflip.fan import Fan, is_smooth
from toricflip.flip import (FlipRecord, anti_flip, check_involution, check_lemma,
                            check_monotonicity, d_flip, make_record, qflip_ok,
                            rational_transform, regular_subdivision, validate_qflip)
from toricflip.lab.catalog import atiyah, francia, generalized_atiyah
from toricflip.lab.fuzz import (Degenerate, instance_rng, mixed_dimension_example,
                                random_circuit_flip, random_mixed_flip)

ORTHANT = Fan(lat.identity(3), [(0, 1, 2)])
BLOWUP = Fan(lat.identity(3) + ((1, 1, 1),), [(0, 1, 3), (0, 2, 3), (1, 2, 3)])
SQUARE = [(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)]


def test_regular_subdivision_of_the_square():
    cells, tie = regular_subdivision(SQUARE, (0, 1, 2, 3), [0, 0, 0, 1])
    assert sorted(cells) == [(0, 1, 2), (1, 2, 3)] and not tie
    cells, tie = regular_subdivision(SQUARE, (0, 1, 2, 3), [1, 0, 0, 0])
    assert sorted(cells) == [(0, 1, 2), (1, 2, 3)]
    cells, tie = regular_subdivision(SQUARE, (0, 1, 2, 3), [0, 1, 0, 0])
    assert sorted(cells) == [(0, 1, 3), (0, 2, 3)]
    # linear heights do not subdivide
    assert regular_subdivision(SQUARE, (0, 1, 2, 3), [0, 0, 0, 0]) == ([(0, 1, 2, 3)], False)
    # a flat square cell next to a bent triangle is a tie, refined by pulling
    pentagon = SQUARE + [(2, 0, 1)]
    cells, tie = regular_subdivision(pentagon, range(5), [0, 0, 0, 0, 1])
    assert tie and len(cells) == 3 and (1, 3, 4) in cells


def test_atiyah_flop():
    e = atiyah()
    rec = d_flip(e.contraction, e.flip_divisor)
    src, tgt = rec.source.fine, rec.target.fine
    assert set(tgt.rays) == set(src.rays)
    assert tgt != src and len(tgt.cones) == 2
    (wall,), (wall_plus,) = rec.source.exceptional_locus.components, rec.transform_E
    assert set(src.generators(wall)) != set(tgt.generators(wall_plus))
    assert rec.c_plus == (2, 2)
    assert qflip_ok(rec)


def test_francia_flip_is_smooth_along_the_transform():
    e = francia()
    rec = d_flip(e.contraction, e.flip_divisor)
    assert rec.log_form and qflip_ok(rec)
    assert rec.transform_E and all(is_smooth(rec.target.fine, t) for t in rec.transform_E)


def test_trivial_divisor_gives_trivial_record():
    c = atiyah().contraction
    rec = d_flip(c, c.pair.k_plus_b)
    assert rec.trivial and rec.target is rec.source
    assert qflip_ok(rec)
    assert check_lemma(rec).verdict == "not_applicable"


def test_validate_qflip_detects_corruption():
    e = francia()
    rec = d_flip(e.contraction, e.flip_divisor)
    bent = list(rec.D_plus)
    bent[0] += 1
    bad = FlipRecord(rec.source, rec.target, rec.D, tuple(bent), rec.transform_E)
    assert validate_qflip(bad)["pushforward"]
    identity = make_record(rec.source, rec.source, (0,) * 4, (0,) * 4)
    assert qflip_ok(identity)


def test_rational_transform_examples():
    e = atiyah()
    rec = d_flip(e.contraction, e.flip_divisor)
    assert rational_transform(rec.source.fine, rec.target.fine, [()]) == [()]
    g = generalized_atiyah(2)
    rec = d_flip(g.contraction, g.flip_divisor)
    assert [rec.target.fine.cone_dim(t) for t in rec.transform_E] == [3]


def test_lemma_examples():
    for entry in (atiyah(), francia()):
        rep = check_lemma(d_flip(entry.contraction, entry.flip_divisor))
        assert rep.verdict == "pass"
        assert (rep.values["d_min"], rep.values["c_plus_min"]) == (1, 2)
    # blow-down of the exceptional divisor, read as a qflip onto a non small target
    c = make_contraction(BLOWUP, ORTHANT)
    rec = d_flip(c, (0, 0, 0, 1))
    assert rec.target.fine == ORTHANT
    assert rec.transform_E == [(0, 1, 2)]
    rep = check_lemma(rec)
    assert rep.verdict == "pass"
    assert rep.values["d_min"] == 2 and 1 <= rep.values["c_plus_min"] <= 3


def test_monotonicity_examples():
    e = atiyah()
    rep = check_monotonicity(d_flip(e.contraction, e.flip_divisor))
    assert rep.verdict == "pass" and rep.values["increases"] == 0 and rep.values["checked"] > 0
    f = francia()
    rec = d_flip(f.contraction, f.flip_divisor)
    rep = check_monotonicity(rec)
    assert rep.verdict == "pass" and rep.values["strict"]
    witness = (1, 1, 0)
    assert rec.source.pair.psi(witness) == Fraction(3, 2)
    assert rec.target.pair.psi(witness) > Fraction(3, 2)
    c = atiyah().contraction
    rep = check_monotonicity(d_flip(c, c.pair.k_plus_b))
    assert rep.verdict == "pass" and rep.values["increases"] == 0


def test_generalized_atiyah_symmetry():
    for d in (1, 2):
        g = generalized_atiyah(d)
        rec = d_flip(g.contraction, g.flip_divisor)
        moved = Fan([lat.mat_vec(g.symmetry, r) for r in rec.target.fine.rays],
                    rec.target.fine.cones)
        assert moved == rec.source.fine
        assert check_involution(rec).verdict == "pass"
        assert set(rec.target.exceptional_locus.components) == set(rec.transform_E)


def test_mixed_dimension_flip():
    inst = mixed_dimension_example()
    rec = d_flip(inst.contraction, inst.divisor)
    assert d_invariant(rec.source) == (1, 2, False)
    assert validate_qflip(rec) == {k: [] for k in validate_qflip(rec)}
    assert check_lemma(rec).verdict == "pass"


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6), st.sampled_from([3, 4]), st.booleans())
def test_fuzzed_flips_are_valid_qflips(seed, n, mixed):
    maker = random_mixed_flip if mixed else random_circuit_flip
    try:
        inst = maker(n, instance_rng(seed, n, "flip"))
    except Degenerate:
        return
    rec = d_flip(inst.contraction, inst.divisor)
    assert qflip_ok(rec)
    assert check_lemma(rec).verdict != "violation"
    assert check_involution(rec).verdict != "violation"
    if rec.source.is_small and not rec.trivial:
        # D+ meets every wall of X+ positively
        for w, _, _ in rec.target.walls:
            assert wall_intersection(rec.target, w, rec.D_plus) > 0
        if not rec.non_unique:
            assert anti_flip(rec).target.fine == rec.source.fine
    if inst.kind != "flop" and rec.log_form:
        assert check_monotonicity(rec).verdict == "pass"
