import io as stdio
import json
import os
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toricflip import io
from toricflip.cli import main
from toricflip.contraction import Contraction
from toricflip.errors import ParseError
from toricflip.fan import Fan
from toricflip.flip import d_flip, qflip_ok
from toricflip.lab import catalog as cat
from toricflip.lab.fuzz import Degenerate, instance_rng, random_circuit_flip, random_mixed_flip
from toricflip.toricpair import ToricPair

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("TORICFLIP_REGEN_GOLDEN") == "1"


def run(argv, stdin=None, capsys=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", stdio.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def emit(name, *params):
    entry = cat.catalog(name, *params)
    return io.dumps(io.contraction_to_dict(entry.contraction, entry.flip_divisor))


# -- round trips ---------------------------------------------------------------


def test_round_trip_catalog():
    for name, params in (("atiyah", ()), ("francia", ()), ("benveniste_boundary", ()),
                         ("generalized_atiyah", (2,)), ("quotient_point", (3, 2))):
        c = cat.catalog(name, *params).contraction
        text = io.serialize(c)
        back = io.parse(text)
        assert isinstance(back, Contraction)
        assert back.fine == c.fine and back.coarse == c.coarse
        assert back.pair.boundary == c.pair.boundary
        assert io.serialize(back) == text


def test_round_trip_fan_and_pair():
    fan = Fan([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
    assert io.parse(io.serialize(fan)) == fan
    pair = ToricPair(fan, [Fraction(1, 3), 0, Fraction(2, 5)])
    back = io.parse(io.serialize(pair))
    assert back.fan == fan and back.boundary == pair.boundary
    assert '"1/3"' in io.serialize(pair)


@given(st.integers(0, 10 ** 6), st.booleans())
def test_round_trip_flip_records(seed, mixed):
    maker = random_mixed_flip if mixed else random_circuit_flip
    try:
        inst = maker(3, instance_rng(seed, 0, "io"))
    except Degenerate:
        return
    rec = d_flip(inst.contraction, inst.divisor)
    doc = io.record_to_dict(rec)
    text = io.dumps(doc)
    back = io.record_from_dict(json.loads(text))
    assert io.dumps(io.record_to_dict(back)) == text
    assert back.target.fine == rec.target.fine and back.D_plus == rec.D_plus
    assert qflip_ok(back)


def test_fingerprint_ignores_ray_order():
    a = Fan([(1, 0, 0), (0, 1, 0), (1, 1, 2)], [(0, 1, 2)])
    b = Fan([(1, 1, 2), (1, 0, 0), (0, 1, 0)], [(1, 2, 0)])
    assert io.fingerprint(a) == io.fingerprint(b)
    c = Fan([(1, 0, 0), (0, 1, 0), (1, 1, 3)], [(0, 1, 2)])
    assert io.fingerprint(a) != io.fingerprint(c)


def test_parse_errors_carry_context():
    with pytest.raises(ParseError, match="line 2"):
        io.parse('{"dimension": 2,\n "rays": [[1,0],, ]}')
    with pytest.raises(ParseError, match="rays\\[1\\]"):
        io.parse('{"dimension": 2, "rays": [[1,0],[0,"x"]], "cones": [[0,1]]}')
    with pytest.raises(ParseError, match="cones"):
        io.parse('{"dimension": 2, "rays": [[1,0],[0,1]]}')
    with pytest.raises(ParseError, match="boundary\\[0\\]"):
        io.parse('{"dimension": 2, "rays": [[1,0],[0,1]], "cones": [[0,1]], '
                 '"boundary": ["1/0", "0"]}')
    with pytest.raises(ParseError, match="out of range"):
        io.parse('{"dimension": 2, "rays": [[1,0],[0,1]], "cones": [[0,5]]}')


# -- the command line ----------------------------------------------------------


def test_atiyah_point_mld(capsys, monkeypatch):
    code, out, _ = run(["mld", "--point"], emit("atiyah"), capsys, monkeypatch)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "2" and lines[1].startswith("witness:")


def test_francia_length(capsys, monkeypatch):
    code, out, _ = run(["length"], emit("francia"), capsys, monkeypatch)
    assert code == 0 and out.strip() == "1/2"


def test_catalog_emit_pipes_through_a_file(tmp_path, capsys):
    assert main(["catalog", "atiyah", "--emit"]) == 0
    path = tmp_path / "atiyah.json"
    path.write_text(capsys.readouterr().out)
    assert main(["validate", str(path)]) == 0
    assert capsys.readouterr().out.startswith("valid Contraction")


def test_fuzz_stream(capsys):
    code = main(["fuzz", "--n", "3", "--count", "100", "--seed", "0"])
    lines = capsys.readouterr().out.splitlines()
    assert code == 0 and len(lines) == 100
    docs = [json.loads(x) for x in lines]
    assert all(d["schema"] == io.SCHEMA and d["verdict"] != "violation" for d in docs)


def test_fuzz_parallel_matches_serial(capsys):
    main(["fuzz", "--n", "3", "--count", "12", "--seed", "7"])
    serial = capsys.readouterr().out
    main(["fuzz", "--n", "3", "--count", "12", "--seed", "7", "--jobs", "2"])
    assert capsys.readouterr().out == serial


def test_exit_codes(capsys, monkeypatch, tmp_path):
    # usage
    assert main(["frobnicate"]) == 1
    assert main(["catalog", "nope"]) == 1
    assert main(["fuzz", "--n", "9"]) == 1
    code, _, err = run(["mld"], "{not json", capsys, monkeypatch)
    assert code == 1 and "line 1" in err
    # violation: an invalid fan
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 2, "rays": [[1,0],[0,1],[1,2]], "cones": [[0,1],[0,2]]}')
    assert main(["validate", str(bad)]) == 2
    assert "NotAFace" in capsys.readouterr().out
    # not applicable: length of a trivial contraction, Borisov on a smooth cone
    orthant = io.dumps({"dimension": 3, "rays": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                        "cones": [[0, 1, 2]],
                        "coarse": {"dimension": 3, "rays": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                                   "cones": [[0, 1, 2]]}})
    code, _, err = run(["length"], orthant, capsys, monkeypatch)
    assert code == 3 and err.startswith("not applicable")
    code, _, _ = run(["check-borisov"], orthant, capsys, monkeypatch)
    assert code == 3
    # pass
    code, _, _ = run(["check-lemma"], emit("francia"), capsys, monkeypatch)
    assert code == 0


def test_json_outputs_carry_the_schema(capsys, monkeypatch):
    for argv in (["contract", "--json"], ["check-lemma", "--json"], ["flip", "--json"],
                 ["check-conj-mineq", "--json"], ["mld", "--json", "--exceptional"]):
        code, out, _ = run(argv, emit("francia"), capsys, monkeypatch)
        assert code == 0
        assert json.loads(out)["schema"] == io.SCHEMA


def test_flip_emit_round_trips_through_the_cli(capsys, monkeypatch):
    code, flipped, _ = run(["flip", "--emit"], emit("generalized_atiyah", 2), capsys, monkeypatch)
    assert code == 0
    # the emitted divisor is D+, ample over the base, so flipping it again is refused
    code, _, err = run(["flip"], flipped, capsys, monkeypatch)
    assert code == 3 and err.startswith("not applicable")
    back_divisor = ",".join(str(-Fraction(x)) for x in json.loads(flipped)["divisor"])
    code, back, _ = run(["flip", "--emit", f"--divisor={back_divisor}"], flipped, capsys,
                        monkeypatch)
    assert code == 0
    assert io.parse(back).fine == cat.generalized_atiyah(2).contraction.fine


# -- golden files ----------------------------------------------------------------

CASES = {
    "atiyah_mld": (["mld", "--json"], ("atiyah",)),
    "francia_contract": (["contract", "--json"], ("francia",)),
    "francia_length": (["length", "--json"], ("francia",)),
    "francia_flip": (["flip", "--json"], ("francia",)),
    "atiyah2_lemma": (["check-lemma", "--json"], ("generalized_atiyah", 2)),
    "atiyah2_mineq": (["check-conj-mineq", "--json"], ("generalized_atiyah", 2)),
    "benveniste_length": (["length", "--json"], ("benveniste_boundary",)),
    "quotient_borisov": (["check-borisov", "--json"], ("quotient_point", 3, 2)),
}


@pytest.mark.parametrize("case", sorted(CASES))
def test_golden(case, capsys, monkeypatch):
    argv, entry = CASES[case]
    code, out, _ = run(argv, emit(*entry), capsys, monkeypatch)
    path = GOLDEN / f"{case}.json"
    if REGEN:
        GOLDEN.mkdir(exist_ok=True)
        path.write_text(out)
    assert out == path.read_text()
    assert code in (0, 3)
    # canonical: re-serializing the output changes nothing
    assert json.dumps(json.loads(out), sort_keys=True, separators=(",", ":")) + "\n" == out
