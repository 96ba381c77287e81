"""Formula interpreter.

Demand-driven: a cell is evaluated the first time something asks for it and
the result is memoized for the rest of the pass. Errors are values, never
exceptions, so callers can compare error behaviour between two workbooks.
"""

from __future__ import annotations

import math
import operator
from typing import Callable, Optional

from .nodes import BinaryOp, BoolLit, CellRef, Expr, FuncCall, NameRef, NumberLit, Paren, RangeRef, TextLit, UnaryOp
from .values import CYCLE, DIV0, EMPTY, NA, NAME, REF, VALUE, ErrorVal, Value, format_value, kind_of
from .workbook import (
    DEFAULT_SHEET,
    CellAddress,
    Formula,
    RangeAddress,
    Workbook,
    parse_address,
    ref_address,
    ref_range,
)

_ORDER = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


def _number_text(f: float) -> str:
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return "%.15g" % f


def to_text(v: Value) -> Value:
    k = kind_of(v)
    if k == "text":
        return v
    if k == "number":
        return _number_text(float(v))
    if k == "boolean":
        return "TRUE" if v else "FALSE"
    if k == "empty":
        return ""
    return v


def to_number(v: Value) -> Value:
    k = kind_of(v)
    if k == "number":
        return float(v)
    if k == "boolean":
        return 1.0 if v else 0.0
    if k == "empty":
        return 0.0
    if k == "error":
        return v
    return VALUE


def to_condition(v: Value) -> Value:
    """Coerce a logical test: numbers by non-zero, empty is FALSE, text is an error."""
    k = kind_of(v)
    if k == "boolean":
        return v
    if k == "number":
        return float(v) != 0.0
    if k == "empty":
        return False
    if k == "error":
        return v
    return VALUE


def compare(op: str, a: Value, b: Value) -> Value:
    """Apply a comparison operator with this package's typing rules."""
    if isinstance(a, ErrorVal):
        return a
    if isinstance(b, ErrorVal):
        return b
    ka, kb = kind_of(a), kind_of(b)
    if ka == "empty" and kb == "empty":
        a, b, ka, kb = 0.0, 0.0, "number", "number"
    elif ka == "empty":
        a, ka = _empty_as(kb), kb
    elif kb == "empty":
        b, kb = _empty_as(ka), ka
    if ka != kb:
        if {ka, kb} == {"boolean", "number"}:
            return VALUE
        if op == "=":
            return False
        if op == "<>":
            return True
        return VALUE
    if ka == "text":
        a, b = a.casefold(), b.casefold()
    elif ka == "number":
        a, b = float(a), float(b)
    if op == "=":
        return a == b
    if op == "<>":
        return a != b
    return _ORDER[op](a, b)


def _empty_as(kind: str) -> Value:
    return {"number": 0.0, "text": "", "boolean": False}[kind]


def _arith(op: str, a: float, b: float) -> Value:
    if op == "+":
        r = a + b
    elif op == "-":
        r = a - b
    elif op == "*":
        r = a * b
    elif op == "/":
        if b == 0.0:
            return DIV0
        r = a / b
    else:
        if a == 0.0 and b < 0:
            return DIV0
        try:
            r = math.pow(a, b)
        except (OverflowError, ValueError):
            return VALUE
    if math.isinf(r) or math.isnan(r):
        return VALUE
    return r


class Evaluator:
    """Evaluates cells of one workbook; reuse it to share the memo table.

    ``trace`` (optional) is called with every address actually evaluated,
    which makes IF laziness observable in tests.
    """

    def __init__(self, workbook: Workbook, trace: Optional[Callable[[CellAddress], None]] = None):
        self.workbook = workbook
        self.trace = trace
        self._memo: dict[CellAddress, Value] = {}
        self._active: set[CellAddress] = set()

    def cell(self, addr) -> Value:
        if isinstance(addr, str):
            addr = parse_address(addr)
        if addr in self._memo:
            return self._memo[addr]
        if addr in self._active:
            return CYCLE
        if self.trace is not None:
            self.trace(addr)
        content = self.workbook.get_cell(addr)
        if not isinstance(content, Formula):
            return content.value
        self._active.add(addr)
        try:
            result = self.expr(content.expr, addr.sheet)
        finally:
            self._active.discard(addr)
        # a cell caught in a cycle is itself an error
        self._memo[addr] = result
        return result

    def expr(self, e: Expr, sheet: str = DEFAULT_SHEET) -> Value:
        if isinstance(e, NumberLit):
            return float(e.value)
        if isinstance(e, TextLit):
            return e.value
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, CellRef):
            return self.cell(ref_address(e, sheet))
        if isinstance(e, Paren):
            return self.expr(e.inner, sheet)
        if isinstance(e, RangeRef):
            # a bare range in scalar position
            return VALUE
        if isinstance(e, NameRef):
            target = self.workbook.resolve_name(e.name)
            if target is None:
                return NAME
            if isinstance(target, RangeAddress):
                return VALUE
            return self.cell(target)
        if isinstance(e, UnaryOp):
            v = to_number(self.expr(e.operand, sheet))
            if isinstance(v, ErrorVal):
                return v
            if e.op == "-":
                return -v
            if e.op == "%":
                return v / 100.0
            return v
        if isinstance(e, BinaryOp):
            return self._binary(e, sheet)
        if isinstance(e, FuncCall):
            fn = _FUNCTIONS.get(e.name)
            if fn is None:
                return NAME
            return fn(self, e.args, sheet)
        raise TypeError(f"not a formula node: {e!r}")

    def _binary(self, e: BinaryOp, sheet: str) -> Value:
        a = self.expr(e.left, sheet)
        b = self.expr(e.right, sheet)
        if isinstance(a, ErrorVal):
            return a
        if isinstance(b, ErrorVal):
            return b
        if e.op in _ORDER or e.op in ("=", "<>"):
            return compare(e.op, a, b)
        if e.op == "&":
            return to_text(a) + to_text(b)
        na, nb = to_number(a), to_number(b)
        if isinstance(na, ErrorVal):
            return na
        if isinstance(nb, ErrorVal):
            return nb
        return _arith(e.op, na, nb)

    def range_of(self, e: Expr, sheet: str) -> RangeAddress | ErrorVal:
        e = _strip(e)
        if isinstance(e, RangeRef):
            return ref_range(e, sheet)
        if isinstance(e, CellRef):
            a = ref_address(e, sheet)
            return RangeAddress(a, a)
        if isinstance(e, NameRef):
            target = self.workbook.resolve_name(e.name)
            if target is None:
                return NAME
            if isinstance(target, CellAddress):
                return RangeAddress(target, target)
            return target
        return VALUE


def _strip(e: Expr) -> Expr:
    while isinstance(e, Paren):
        e = e.inner
    return e


# functions; each takes (evaluator, raw args, sheet) so IF can stay lazy


def _fn_if(ev: Evaluator, args, sheet):
    if len(args) not in (2, 3):
        return VALUE
    cond = to_condition(ev.expr(args[0], sheet))
    if isinstance(cond, ErrorVal):
        return cond
    if cond:
        return ev.expr(args[1], sheet)
    if len(args) == 3:
        return ev.expr(args[2], sheet)
    return False


def _fn_iferror(ev: Evaluator, args, sheet):
    if len(args) != 2:
        return VALUE
    v = ev.expr(args[0], sheet)
    if isinstance(v, ErrorVal):
        return ev.expr(args[1], sheet)
    return v


def _fn_not(ev: Evaluator, args, sheet):
    if len(args) != 1:
        return VALUE
    cond = to_condition(ev.expr(args[0], sheet))
    if isinstance(cond, ErrorVal):
        return cond
    return not cond


def _logical_args(ev: Evaluator, args, sheet):
    """Every argument is evaluated; ranges contribute their boolean/number cells."""
    out = []
    first_error = None
    for arg in args:
        s = _strip(arg)
        if isinstance(s, RangeRef):
            rng = ref_range(s, sheet)
            for addr in rng.cells():
                v = ev.cell(addr)
                k = kind_of(v)
                if k == "error":
                    first_error = first_error or v
                elif k in ("boolean", "number"):
                    out.append(to_condition(v))
            continue
        c = to_condition(ev.expr(arg, sheet))
        if isinstance(c, ErrorVal):
            first_error = first_error or c
        else:
            out.append(c)
    if first_error is not None:
        return first_error
    if not out:
        return VALUE
    return out


def _fn_and(ev, args, sheet):
    vals = _logical_args(ev, args, sheet)
    return vals if isinstance(vals, ErrorVal) else all(vals)


def _fn_or(ev, args, sheet):
    vals = _logical_args(ev, args, sheet)
    return vals if isinstance(vals, ErrorVal) else any(vals)


def _lookup(ev: Evaluator, args, sheet, vertical: bool):
    if len(args) not in (3, 4):
        return VALUE
    key = ev.expr(args[0], sheet)
    if isinstance(key, ErrorVal):
        return key
    table = ev.range_of(args[1], sheet)
    if isinstance(table, ErrorVal):
        return table
    index = to_number(ev.expr(args[2], sheet))
    if isinstance(index, ErrorVal):
        return index
    if len(args) < 4:
        return VALUE
    mode = ev.expr(args[3], sheet)
    if isinstance(mode, ErrorVal):
        return mode
    exact = to_condition(mode)
    if isinstance(exact, ErrorVal) or exact:
        # approximate match is deliberately unsupported
        return VALUE
    index = int(index)
    top = min(table.start.row, table.end.row)
    left = min(table.start.column, table.end.column)
    height = abs(table.end.row - table.start.row) + 1
    width = abs(table.end.column - table.start.column) + 1
    if index < 1:
        return VALUE
    if index > (width if vertical else height):
        return REF
    for i in range(height if vertical else width):
        probe = CellAddress(table.sheet, left, top + i) if vertical else CellAddress(table.sheet, left + i, top)
        v = ev.cell(probe)
        if isinstance(v, ErrorVal):
            continue
        if compare("=", v, key) is True:
            if vertical:
                return ev.cell(CellAddress(table.sheet, left + index - 1, top + i))
            return ev.cell(CellAddress(table.sheet, left + i, top + index - 1))
    return NA


def _fn_vlookup(ev, args, sheet):
    return _lookup(ev, args, sheet, vertical=True)


def _fn_hlookup(ev, args, sheet):
    return _lookup(ev, args, sheet, vertical=False)


_FUNCTIONS = {
    "IF": _fn_if,
    "IFERROR": _fn_iferror,
    "NOT": _fn_not,
    "AND": _fn_and,
    "OR": _fn_or,
    "VLOOKUP": _fn_vlookup,
    "HLOOKUP": _fn_hlookup,
}


def evaluate_cell(workbook: Workbook, address) -> Value:
    return Evaluator(workbook).cell(address)


def evaluate_expr(workbook: Workbook, expr: Expr, sheet: str = DEFAULT_SHEET) -> Value:
    return Evaluator(workbook).expr(expr, sheet)


def evaluate_all(workbook: Workbook) -> dict[CellAddress, Value]:
    """Values of every stored cell, sharing one memo table."""
    ev = Evaluator(workbook)
    return {addr: ev.cell(addr) for addr in sorted(workbook.cells)}


__all__ = [
    "Evaluator",
    "compare",
    "evaluate_cell",
    "evaluate_expr",
    "evaluate_all",
    "format_value",
    "to_condition",
    "to_number",
    "to_text",
]
