"""Exception hierarchy shared by every module."""

from __future__ import annotations


class QuonError(Exception):
    """Base class for all package errors."""


class InvalidDimension(QuonError):
    pass


class ShapeError(QuonError):
    pass


class SiteError(QuonError):
    pass


class AlgebraMismatch(QuonError):
    pass


class TwistError(QuonError):
    pass


class OddSiteError(QuonError):
    pass


class CapExceeded(QuonError):
    pass


class ImpossibleOutcome(QuonError):
    pass


class NotFound(QuonError):
    pass


class NonNeutralWord(QuonError):
    """A strand word leaves the neutral (1-quon) subspace."""


class NonCancellingCharges(QuonError):
    """A closed loop whose charge ordering would need phase bookkeeping."""


class BasisError(QuonError):
    pass


class GraphError(QuonError):
    pass


class NoMatch(QuonError):
    pass


class NotCompilable(QuonError):
    pass


class ParseError(QuonError):
    def __init__(self, line: int, column: int, expected: list[str] | tuple[str, ...], found: str = ""):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        self.found = found
        msg = f"line {line}, column {column}: expected one of {', '.join(self.expected)}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)
