"""Exact toric birational geometry: fans, pairs, contractions and D-flips.

Everything is computed over the integers and :class:`fractions.Fraction`;
no floating point value enters a verdict.
"""

from .contraction import (Contraction, d_invariant, exceptional_locus, length,
                          make_contraction, relative_positivity, wall_intersection)
from .errors import ToricError
from .fan import Fan, Refinement, common_refinement, is_smooth, validate, walls
from .flip import (FlipRecord, check_lemma, check_monotonicity, d_flip,
                   rational_transform, validate_qflip)
from .report import CheckReport
from .toricpair import ToricPair, log_discrepancy, mld, pl_function

__version__ = "0.1.0"

__all__ = [
    "CheckReport", "Contraction", "Fan", "FlipRecord", "Refinement", "ToricError",
    "ToricPair", "check_lemma", "check_monotonicity", "common_refinement", "d_flip",
    "d_invariant", "exceptional_locus", "is_smooth", "length", "log_discrepancy",
    "make_contraction", "mld", "pl_function", "rational_transform", "relative_positivity",
    "validate", "validate_qflip", "wall_intersection", "walls",
]
