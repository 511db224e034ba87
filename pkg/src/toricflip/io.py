"""JSON interchange: fan documents, flip records and instance fingerprints.

A fan document is a JSON object::

    {"dimension": 3, "rays": [[1, 0, 0], ...], "cones": [[0, 1, 2], ...],
     "boundary": ["0", "1/2", ...],              # optional
     "coarse": {"dimension": 3, "rays": ..., "cones": ...},  # optional
     "assignment": [0, 0],                       # optional
     "divisor": ["-1", ...]}                     # optional

Rationals are strings ``"p/q"`` and never floats.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

from . import lattice as lat
from .contraction import Contraction
from .errors import ParseError, ToricError
from .fan import Fan, Refinement
from .toricpair import ToricPair

SCHEMA = 1


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, no whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _rationals(values) -> list:
    return [lat.format_rational(Fraction(x)) for x in values]


def fan_to_dict(fan: Fan) -> dict:
    return {"dimension": fan.dim, "rays": [list(r) for r in fan.rays],
            "cones": [list(c) for c in fan.cones]}


def pair_to_dict(pair: ToricPair) -> dict:
    d = fan_to_dict(pair.fan)
    if any(pair.boundary):
        d["boundary"] = _rationals(pair.boundary)
    return d


def contraction_to_dict(c: Contraction, divisor=None) -> dict:
    d = pair_to_dict(c.pair)
    d["coarse"] = fan_to_dict(c.coarse)
    d["assignment"] = list(c.refinement.assignment)
    if divisor is not None:
        d["divisor"] = _rationals(divisor)
    return d


def to_dict(obj, divisor=None) -> dict:
    if isinstance(obj, Contraction):
        return contraction_to_dict(obj, divisor)
    if isinstance(obj, ToricPair):
        return pair_to_dict(obj)
    if isinstance(obj, Fan):
        return fan_to_dict(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def serialize(obj, divisor=None) -> str:
    return dumps(to_dict(obj, divisor))


# -- parsing -----------------------------------------------------------------


def _field(doc: dict, key: str, where: str):
    if key not in doc:
        raise ParseError(f"{where}: missing field {key!r}", field=key)
    return doc[key]


def _int_list(value, where: str) -> list:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool)
                                              for x in value):
        raise ParseError(f"{where}: expected a list of integers, got {value!r}")
    return value


def _rational_list(value, where: str, length: int) -> tuple:
    if not isinstance(value, list) or len(value) != length:
        raise ParseError(f"{where}: expected {length} rationals")
    out = []
    for i, x in enumerate(value):
        try:
            out.append(lat.parse_rational(x))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{where}[{i}]: {exc}") from None
    return tuple(out)


def fan_from_dict(doc: dict, where: str = "fan") -> Fan:
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: expected an object")
    dim = _field(doc, "dimension", where)
    if not isinstance(dim, int) or dim < 1:
        raise ParseError(f"{where}.dimension: expected a positive integer")
    rays = [_int_list(r, f"{where}.rays[{i}]") for i, r in enumerate(_field(doc, "rays", where))]
    for i, r in enumerate(rays):
        if len(r) != dim:
            raise ParseError(f"{where}.rays[{i}]: expected {dim} coordinates")
    cones = [_int_list(c, f"{where}.cones[{i}]") for i, c in enumerate(_field(doc, "cones", where))]
    for i, c in enumerate(cones):
        if any(not 0 <= k < len(rays) for k in c):
            raise ParseError(f"{where}.cones[{i}]: ray index out of range")
    return Fan(rays, cones, dim)


def from_dict(doc: dict):
    """Parse a document into a Fan, ToricPair or Contraction (by its fields)."""
    fan = fan_from_dict(doc)
    boundary = None
    if doc.get("boundary") is not None:
        boundary = _rational_list(doc["boundary"], "boundary", len(fan.rays))
    if doc.get("coarse") is None:
        return ToricPair(fan, boundary) if boundary is not None else fan
    coarse = fan_from_dict(doc["coarse"], "coarse")
    assignment = doc.get("assignment")
    try:
        ref = Refinement(fan, coarse, tuple(assignment) if assignment is not None else None)
    except ToricError as exc:
        raise ParseError(f"coarse: {exc}") from exc
    return Contraction(ref, ToricPair(fan, boundary))


def divisor_from_dict(doc: dict, fan: Fan):
    if doc.get("divisor") is None:
        return None
    return _rational_list(doc["divisor"], "divisor", len(fan.rays))


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level: expected an object")
    return doc


def parse(text: str):
    return from_dict(loads(text))


# -- identity ----------------------------------------------------------------


def fingerprint(obj) -> str:
    """Hash of a document that ignores the order of rays and cones."""
    doc = to_dict(obj) if not isinstance(obj, dict) else obj

    def normal(d):
        rays = [tuple(r) for r in d["rays"]]
        order = sorted(range(len(rays)), key=lambda i: rays[i])
        pos = {old: new for new, old in enumerate(order)}
        out = {"dimension": d["dimension"], "rays": [list(rays[i]) for i in order],
               "cones": sorted(sorted(pos[i] for i in c) for c in d["cones"])}
        if d.get("boundary"):
            out["boundary"] = [d["boundary"][i] for i in order]
        if d.get("coarse"):
            out["coarse"] = normal(d["coarse"])
        return out

    return hashlib.sha256(dumps(normal(doc)).encode()).hexdigest()[:16]


# -- flip records --------------------------------------------------------------


def record_to_dict(rec) -> dict:
    return {"schema": SCHEMA,
            "source": contraction_to_dict(rec.source, rec.D),
            "target": contraction_to_dict(rec.target, rec.D_plus),
            "transform_E": [list(t) for t in rec.transform_E],
            "c_plus": [None if not rec.transform_E else x for x in rec.c_plus],
            "non_unique": rec.non_unique, "trivial": rec.trivial, "log_form": rec.log_form}


def record_from_dict(doc: dict):
    from .flip import FlipRecord

    src = from_dict(doc["source"])
    tgt = from_dict(doc["target"])
    if not isinstance(src, Contraction) or not isinstance(tgt, Contraction):
        raise ParseError("flip record needs source and target contractions")
    return FlipRecord(src, tgt, divisor_from_dict(doc["source"], src.fine),
                      divisor_from_dict(doc["target"], tgt.fine),
                      [tuple(t) for t in doc.get("transform_E", [])],
                      bool(doc.get("non_unique")), bool(doc.get("trivial")),
                      bool(doc.get("log_form")))
