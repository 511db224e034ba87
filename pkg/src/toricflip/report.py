"""Check reports shared by the verification routines."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

PASS = "pass"
VIOLATION = "violation"
NOT_APPLICABLE = "not_applicable"


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, MinusInfinity):
        return "-inf"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in x]
        return sorted(items, key=json.dumps) if isinstance(x, (set, frozenset)) else items
    return str(x)


class MinusInfinity:
    """Sentinel for d and a of an isomorphism (empty exceptional locus)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "-inf"

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self


MINUS_INFINITY = MinusInfinity()


@dataclass
class CheckReport:
    check: str
    verdict: str
    values: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    fingerprint: str = ""
    elapsed: float | None = None
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict != VIOLATION

    def to_dict(self, timing: bool = False) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("elapsed")
        return _jsonable(d)

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, separators=(",", ":"))
