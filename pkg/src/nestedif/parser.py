"""Parse and print A1-style spreadsheet formulas.

Precedence, loosest first: comparison, ``&``, ``+ -``, ``* /``, ``^``,
prefix ``- +``, postfix ``%``. Every binary operator is left-associative,
``^`` included, and prefix minus binds tighter than ``^`` so ``-2^2`` is
``(-2)^2``.
"""

from __future__ import annotations

import math
import re

from . import lexer
from .errors import FormulaSyntaxError, UnbalancedParens
from .nodes import (
    BinaryOp,
    BoolLit,
    CellRef,
    Expr,
    FuncCall,
    NameRef,
    NumberLit,
    Paren,
    RangeRef,
    TextLit,
    UnaryOp,
    children,
    is_if,
    walk,
)

MAX_COLUMN = 16384
MAX_ROW = 1048576

_REF_RE = re.compile(r"^(\$?)([A-Za-z]{1,3})(\$?)([0-9]+)$")
_NAME_RE = re.compile(r"^[A-Za-z_\\][A-Za-z0-9_.]*$")
_BARE_SHEET_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")

_COMPARISON = frozenset(("=", "<>", "<", "<=", ">", ">="))

# binding strength used by the printer; higher binds tighter
_PREC = {
    "=": 1, "<>": 1, "<": 1, "<=": 1, ">": 1, ">=": 1,
    "&": 2,
    "+": 3, "-": 3,
    "*": 4, "/": 4,
    "^": 5,
}
_PREFIX_PREC = 6
_POSTFIX_PREC = 7
_ATOM_PREC = 8


def column_index(letters: str) -> int:
    """Bijective base-26: ``A`` is 1, ``Z`` 26, ``AA`` 27."""
    n = 0
    for ch in letters.upper():
        if not "A" <= ch <= "Z":
            raise ValueError(f"bad column letters: {letters!r}")
        n = n * 26 + (ord(ch) - 64)
    if n == 0:
        raise ValueError("empty column letters")
    return n


def column_letters(index: int) -> str:
    if index < 1:
        raise ValueError(f"column index must be >= 1, got {index}")
    out = []
    while index:
        index, rem = divmod(index - 1, 26)
        out.append(chr(65 + rem))
    return "".join(reversed(out))


def match_cell_ref(text: str) -> tuple[int, int, bool, bool] | None:
    """Return ``(column, row, col_abs, row_abs)`` if ``text`` is an A1 reference within grid bounds."""
    m = _REF_RE.match(text)
    if not m:
        return None
    col = column_index(m.group(2))
    row = int(m.group(4))
    if not (1 <= col <= MAX_COLUMN and 1 <= row <= MAX_ROW):
        return None
    return col, row, bool(m.group(1)), bool(m.group(3))


def is_valid_name(text: str) -> bool:
    upper = text.upper()
    return bool(_NAME_RE.match(text)) and not _REF_RE.match(text) and upper not in ("TRUE", "FALSE")


class _Parser:
    def __init__(self, data: bytes, tokens, base: int):
        self.data = data
        self.tokens = tokens
        self.pos = 0
        self.base = base
        self.depth = 0

    # token helpers

    def peek(self, ahead=0):
        i = self.pos + ahead
        if i < len(self.tokens):
            return self.tokens[i]
        return None

    def text(self, tok) -> str:
        return self.data[tok[1]:tok[2]].decode("utf-8")

    def offset(self) -> int:
        tok = self.peek()
        return (tok[1] if tok else len(self.data)) + self.base

    def span(self, start, end) -> tuple[int, int]:
        return (start + self.base, end + self.base)

    def at_op(self, *ops) -> str | None:
        tok = self.peek()
        if tok is not None and tok[0] == lexer.OP:
            t = self.text(tok)
            if t in ops:
                return t
        return None

    def fail(self, message, expected):
        if self.peek() is None and self.depth > 0:
            raise UnbalancedParens("unclosed parenthesis", self.offset(), "')'")
        raise FormulaSyntaxError(message, self.offset(), expected)

    def expect(self, kind, expected):
        tok = self.peek()
        if tok is None or tok[0] != kind:
            if tok is None:
                self.fail("unexpected end of formula", expected)
            if tok[0] == lexer.RPAREN and self.depth == 0:
                raise UnbalancedParens("unmatched ')'", self.offset(), expected)
            self.fail(f"unexpected {self.text(tok)!r}", expected)
        self.pos += 1
        return tok

    # grammar

    def parse(self) -> Expr:
        if not self.tokens:
            raise FormulaSyntaxError("empty formula", self.base, "an expression")
        expr = self.comparison()
        tok = self.peek()
        if tok is not None:
            if tok[0] == lexer.RPAREN:
                raise UnbalancedParens("unmatched ')'", self.offset(), "end of formula")
            raise FormulaSyntaxError(f"unexpected {self.text(tok)!r}", self.offset(), "end of formula")
        return expr

    def _binary_level(self, ops, sub):
        left = sub()
        while True:
            op = self.at_op(*ops)
            if op is None:
                return left
            self.pos += 1
            right = sub()
            left = BinaryOp(op, left, right, span=(left.span[0], right.span[1]))

    def comparison(self):
        return self._binary_level(_COMPARISON, self.concat)

    def concat(self):
        return self._binary_level(("&",), self.additive)

    def additive(self):
        return self._binary_level(("+", "-"), self.multiplicative)

    def multiplicative(self):
        return self._binary_level(("*", "/"), self.power)

    def power(self):
        return self._binary_level(("^",), self.unary)

    def unary(self):
        op = self.at_op("-", "+")
        if op is not None:
            start = self.peek()[1] + self.base
            self.pos += 1
            operand = self.unary()
            return UnaryOp(op, operand, span=(start, operand.span[1]))
        return self.postfix()

    def postfix(self):
        expr = self.primary()
        while self.at_op("%"):
            tok = self.peek()
            self.pos += 1
            expr = UnaryOp("%", expr, span=(expr.span[0], tok[2] + self.base))
        return expr

    def primary(self):
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of formula", "an expression")
        kind, start, end = tok
        if kind == lexer.NUMBER:
            self.pos += 1
            return NumberLit(float(self.text(tok)), span=self.span(start, end))
        if kind == lexer.STRING:
            self.pos += 1
            raw = self.data[start + 1:end - 1].decode("utf-8")
            return TextLit(raw.replace('""', '"'), span=self.span(start, end))
        if kind == lexer.LPAREN:
            self.pos += 1
            self.depth += 1
            inner = self.comparison()
            close = self.expect(lexer.RPAREN, "')'")
            self.depth -= 1
            return Paren(inner, span=self.span(start, close[2]))
        if kind == lexer.QSHEET:
            self.pos += 1
            sheet = self.data[start + 1:end - 1].decode("utf-8").replace("''", "'")
            self.expect(lexer.BANG, "'!'")
            return self.reference(sheet, start)
        if kind == lexer.IDENT:
            nxt = self.peek(1)
            word = self.text(tok)
            if nxt is not None and nxt[0] == lexer.LPAREN:
                return self.call(word, start)
            if nxt is not None and nxt[0] == lexer.BANG:
                self.pos += 2
                return self.reference(word, start)
            if word.upper() in ("TRUE", "FALSE"):
                self.pos += 1
                return BoolLit(word.upper() == "TRUE", span=self.span(start, end))
            if _REF_RE.match(word):
                return self.reference(None, start)
            if _NAME_RE.match(word):
                self.pos += 1
                return NameRef(word, span=self.span(start, end))
            self.fail(f"malformed reference or name {word!r}", "a cell reference or name")
        if kind == lexer.RPAREN and self.depth == 0:
            raise UnbalancedParens("unmatched ')'", self.offset(), "an expression")
        self.fail(f"unexpected {self.text(tok)!r}", "an expression")

    def cell(self, sheet):
        tok = self.expect(lexer.IDENT, "a cell reference")
        parts = match_cell_ref(self.text(tok))
        if parts is None:
            self.pos -= 1
            problem = "out of range" if _REF_RE.match(self.text(tok)) else "malformed"
            self.fail(f"cell reference {self.text(tok)!r} is {problem}", "a cell reference")
        col, row, cabs, rabs = parts
        return CellRef(col, row, cabs, rabs, sheet, span=self.span(tok[1], tok[2]))

    def reference(self, sheet, start):
        first = self.cell(sheet)
        first = CellRef(first.column, first.row, first.column_absolute, first.row_absolute, sheet,
                        span=(start + self.base, first.span[1]))
        tok = self.peek()
        if tok is not None and tok[0] == lexer.COLON:
            self.pos += 1
            last = self.cell(None)
            return RangeRef(first, last, span=(first.span[0], last.span[1]))
        return first

    def call(self, name, start):
        self.pos += 2  # name and '('
        self.depth += 1
        args = []
        tok = self.peek()
        if tok is not None and tok[0] == lexer.RPAREN:
            self.pos += 1
            self.depth -= 1
            return FuncCall(name.upper(), (), span=self.span(start, tok[2]))
        while True:
            args.append(self.comparison())
            tok = self.peek()
            if tok is not None and tok[0] == lexer.COMMA:
                self.pos += 1
                continue
            close = self.expect(lexer.RPAREN, "',' or ')'")
            self.depth -= 1
            return FuncCall(name.upper(), tuple(args), span=self.span(start, close[2]))


def parse_formula(text: str) -> Expr:
    """Parse formula text, with or without a leading ``=``.

    >>> print_formula(parse_formula("=if(a1=1,2,3)"))
    '=IF(A1=1, 2, 3)'
    """
    if not text:
        raise FormulaSyntaxError("empty formula", 0, "an expression")
    data = text.encode("utf-8")
    base = 0
    if data.startswith(b"="):
        data = data[1:]
        base = 1
    tokens = lexer.tokenize(data)
    return _Parser(data, tokens, base).parse()


# printing


def format_number(value: float) -> str:
    if math.isnan(value) or math.isinf(value):
        raise ValueError(f"not representable in a formula: {value!r}")
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def quote_text(value: str) -> str:
    return '"' + value.replace('"', '""') + '"'


def format_sheet(sheet: str) -> str:
    if _BARE_SHEET_RE.match(sheet) and match_cell_ref(sheet) is None and sheet.upper() not in ("TRUE", "FALSE"):
        return sheet
    return "'" + sheet.replace("'", "''") + "'"


def format_cell_ref(ref: CellRef, with_sheet: bool = True) -> str:
    prefix = format_sheet(ref.sheet) + "!" if (with_sheet and ref.sheet) else ""
    return "%s%s%s%s%d" % (
        prefix,
        "$" if ref.column_absolute else "",
        column_letters(ref.column),
        "$" if ref.row_absolute else "",
        ref.row,
    )


def _prec(expr: Expr) -> int:
    if isinstance(expr, BinaryOp):
        return _PREC[expr.op]
    if isinstance(expr, UnaryOp):
        return _POSTFIX_PREC if expr.op == "%" else _PREFIX_PREC
    return _ATOM_PREC


def _wrap(expr: Expr, need: bool) -> str:
    text = _fmt(expr)
    return f"({text})" if need else text


def _fmt(expr: Expr) -> str:
    if isinstance(expr, NumberLit):
        return format_number(expr.value)
    if isinstance(expr, TextLit):
        return quote_text(expr.value)
    if isinstance(expr, BoolLit):
        return "TRUE" if expr.value else "FALSE"
    if isinstance(expr, CellRef):
        return format_cell_ref(expr)
    if isinstance(expr, RangeRef):
        return format_cell_ref(expr.start) + ":" + format_cell_ref(expr.end)
    if isinstance(expr, NameRef):
        return expr.name
    if isinstance(expr, FuncCall):
        return expr.name + "(" + ", ".join(_fmt(a) for a in expr.args) + ")"
    if isinstance(expr, Paren):
        return "(" + _fmt(expr.inner) + ")"
    if isinstance(expr, BinaryOp):
        p = _PREC[expr.op]
        left = _wrap(expr.left, _prec(expr.left) < p)
        right = _wrap(expr.right, _prec(expr.right) <= p)
        return left + expr.op + right
    if isinstance(expr, UnaryOp):
        if expr.op == "%":
            return _wrap(expr.operand, _prec(expr.operand) < _POSTFIX_PREC) + "%"
        return expr.op + _wrap(expr.operand, _prec(expr.operand) < _PREFIX_PREC)
    raise TypeError(f"not a formula node: {expr!r}")


def print_formula(expr: Expr) -> str:
    """Canonical text with a leading ``=``; parentheses only where grouping needs them."""
    return "=" + _fmt(expr)


def format_expr(expr: Expr) -> str:
    """Like :func:`print_formula` without the leading ``=``."""
    return _fmt(expr)


# metrics


def count_ifs(expr: Expr) -> int:
    return sum(1 for node in walk(expr) if is_if(node))


def nesting_depth(expr: Expr) -> int:
    """Largest number of IF calls on any root-to-leaf path."""
    best = 0
    stack = [(expr, 0)]
    while stack:
        node, above = stack.pop()
        here = above + (1 if is_if(node) else 0)
        kids = children(node)
        if not kids:
            best = max(best, here)
        for kid in kids:
            stack.append((kid, here))
    return best
