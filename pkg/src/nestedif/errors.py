"""Exception hierarchy.

Formula evaluation never raises; everything here is about malformed input,
refused transforms, or misuse of the API.
"""

from __future__ import annotations


class NestedIfError(Exception):
    """Base class for every error raised by this package."""


class FormulaSyntaxError(NestedIfError, ValueError):
    """Malformed formula text.

    ``offset`` is a byte offset into the UTF-8 encoded formula (including a
    leading ``=`` if one was given); ``expected`` describes what the parser
    was looking for.
    """

    def __init__(self, message: str, offset: int, expected: str | None = None):
        self.offset = offset
        self.expected = expected
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class UnbalancedParens(FormulaSyntaxError):
    pass


class UnterminatedString(FormulaSyntaxError):
    pass


class BadAddress(NestedIfError, ValueError):
    pass


class CellListSyntaxError(NestedIfError, ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DuplicateCell(CellListSyntaxError):
    pass


class DuplicateName(CellListSyntaxError):
    pass


class NotAnIf(NestedIfError, ValueError):
    pass


class ComplexChain(NestedIfError, ValueError):
    """An IF carries nested IFs in both value positions.

    ``span`` is the source span of the offending IF node when known.
    """

    def __init__(self, message: str, span: tuple[int, int] | None = None):
        self.span = span
        super().__init__(message)


class NotNormalized(NestedIfError, ValueError):
    pass


class NotAFormula(NestedIfError, ValueError):
    pass


class PlacementCollision(NestedIfError, ValueError):
    def __init__(self, blocking: list[str]):
        self.blocking = list(blocking)
        super().__init__("placement region is occupied: " + ", ".join(self.blocking))


class EmptyDrivers(NestedIfError, ValueError):
    pass
