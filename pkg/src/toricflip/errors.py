"""Exception hierarchy.

Every error carries a short ``code`` (e.g. ``"NotPointed"``) so that callers
such as the command line driver can map failures to diagnostics without
string matching on messages.
"""


class ToricError(ValueError):
    code = "ToricError"

    def __init__(self, message="", **context):
        super().__init__(message or self.code)
        self.context = context


class ZeroVector(ToricError):
    code = "ZeroVector"


class NotPointed(ToricError):
    code = "NotPointed"


class InvalidFan(ToricError):
    code = "InvalidFan"


class OutsideSupport(ToricError):
    code = "OutsideSupport"


class SupportMismatch(ToricError):
    code = "SupportMismatch"


class UnknownCone(ToricError):
    code = "UnknownCone"


class NotRCartier(ToricError):
    code = "NotRCartier"


class NotPrimitive(ToricError):
    code = "NotPrimitive"


class NotLogCanonical(ToricError):
    code = "NotLogCanonical"


class BadWall(ToricError):
    code = "BadWall"


class NotDContraction(ToricError):
    code = "NotDContraction"


class NotApplicable(ToricError):
    code = "NotApplicable"


class CatalogError(ToricError):
    code = "CatalogError"


class ParseError(ToricError):
    code = "ParseError"


class DegenerateHeights(ToricError):
    code = "DegenerateHeights"
