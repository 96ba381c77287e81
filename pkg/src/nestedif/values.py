"""Runtime values.

Numbers are ``float``, text is ``str``, booleans are ``bool``; the empty cell
is the :data:`EMPTY` singleton and errors are :class:`ErrorVal` instances.
Because ``bool`` subclasses ``int`` in Python, type tests must check
``bool`` before numbers; :func:`kind_of` does that once for everyone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union


class ErrorKind(enum.Enum):
    DIV0 = "#DIV/0!"
    NA = "#N/A"
    VALUE = "#VALUE!"
    NAME = "#NAME?"
    REF = "#REF!"
    CYCLE = "#CYCLE!"


@dataclass(frozen=True)
class ErrorVal:
    kind: ErrorKind

    def __str__(self):
        return self.kind.value


class _Empty:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EMPTY"

    def __reduce__(self):
        return (_Empty, ())


EMPTY = _Empty()

Value = Union[float, str, bool, _Empty, ErrorVal]

DIV0 = ErrorVal(ErrorKind.DIV0)
NA = ErrorVal(ErrorKind.NA)
VALUE = ErrorVal(ErrorKind.VALUE)
NAME = ErrorVal(ErrorKind.NAME)
REF = ErrorVal(ErrorKind.REF)
CYCLE = ErrorVal(ErrorKind.CYCLE)


def kind_of(v: Value) -> str:
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, (int, float)):
        return "number"
    if isinstance(v, str):
        return "text"
    if v is EMPTY:
        return "empty"
    if isinstance(v, ErrorVal):
        return "error"
    raise TypeError(f"not a spreadsheet value: {v!r}")


def is_error(v: Value) -> bool:
    return isinstance(v, ErrorVal)


def same_value(a: Value, b: Value) -> bool:
    """Exact, type-strict identity of two results (``1.0`` is not ``TRUE``)."""
    ka, kb = kind_of(a), kind_of(b)
    if ka != kb:
        return False
    if ka == "number":
        return float(a) == float(b)
    return a == b


def format_value(v: Value) -> str:
    """Human-readable rendering used in reports."""
    k = kind_of(v)
    if k == "boolean":
        return "TRUE" if v else "FALSE"
    if k == "number":
        f = float(v)
        return str(int(f)) if f == int(f) and abs(f) < 1e15 else repr(f)
    if k == "text":
        return '"' + v.replace('"', '""') + '"'
    if k == "empty":
        return "<empty>"
    return str(v)


def value_to_json(v: Value):
    k = kind_of(v)
    if k == "empty":
        return None
    if k == "error":
        return {"error": v.kind.name}
    if k == "number":
        return float(v)
    return v
