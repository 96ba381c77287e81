"""Formula AST.

Nodes are frozen dataclasses. ``span`` is a ``(start, end)`` byte range into
the source text and is excluded from equality and hashing, so two parses of
the same formula with different spacing compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Optional, Union

Span = tuple[int, int]
NO_SPAN: Span = (0, 0)


def _span():
    return field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class NumberLit:
    value: float
    span: Span = _span()


@dataclass(frozen=True)
class TextLit:
    value: str
    span: Span = _span()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Span = _span()


@dataclass(frozen=True)
class CellRef:
    column: int
    row: int
    column_absolute: bool = False
    row_absolute: bool = False
    sheet: Optional[str] = None
    span: Span = _span()

    def __post_init__(self):
        if self.column < 1 or self.row < 1:
            raise ValueError(f"cell reference out of range: column={self.column} row={self.row}")


@dataclass(frozen=True)
class RangeRef:
    start: CellRef
    end: CellRef
    span: Span = _span()


@dataclass(frozen=True)
class NameRef:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class FuncCall:
    name: str
    args: tuple["Expr", ...]
    span: Span = _span()

    def __post_init__(self):
        if self.name != self.name.upper():
            object.__setattr__(self, "name", self.name.upper())
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class UnaryOp:
    """Prefix ``-``/``+`` or postfix ``%``."""

    op: str
    operand: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Paren:
    inner: "Expr"
    span: Span = _span()


Expr = Union[NumberLit, TextLit, BoolLit, CellRef, RangeRef, NameRef, FuncCall, BinaryOp, UnaryOp, Paren]

COMPARISON_OPS = ("=", "<>", "<", "<=", ">", ">=")
BINARY_OPS = COMPARISON_OPS + ("&", "+", "-", "*", "/", "^")


def children(expr: Expr) -> tuple[Expr, ...]:
    if isinstance(expr, FuncCall):
        return expr.args
    if isinstance(expr, BinaryOp):
        return (expr.left, expr.right)
    if isinstance(expr, (UnaryOp,)):
        return (expr.operand,)
    if isinstance(expr, Paren):
        return (expr.inner,)
    if isinstance(expr, RangeRef):
        return (expr.start, expr.end)
    return ()


def walk(expr: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def map_children(expr: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    """Rebuild ``expr`` with ``fn`` applied to each direct child."""
    if isinstance(expr, FuncCall):
        return replace(expr, args=tuple(fn(a) for a in expr.args))
    if isinstance(expr, BinaryOp):
        return replace(expr, left=fn(expr.left), right=fn(expr.right))
    if isinstance(expr, UnaryOp):
        return replace(expr, operand=fn(expr.operand))
    if isinstance(expr, Paren):
        return replace(expr, inner=fn(expr.inner))
    return expr


def is_if(expr: Expr) -> bool:
    return isinstance(expr, FuncCall) and expr.name == "IF"


def unparen(expr: Expr) -> Expr:
    while isinstance(expr, Paren):
        expr = expr.inner
    return expr


def references(expr: Expr) -> Iterator[CellRef]:
    """Every cell reference in ``expr``, range endpoints included."""
    for node in walk(expr):
        if isinstance(node, CellRef):
            yield node
