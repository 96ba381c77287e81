"""In-memory workbook and the line-oriented cell-list file format.

A cell-list document looks like::

    # comment
    B10 := MH
    B14 := 5
    B5 := =IF(B10="Rev", B14*B15/B16, "n/a")
    name Test1 := E12

Addresses without a sheet prefix belong to ``Sheet1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .errors import BadAddress, CellListSyntaxError, DuplicateCell, DuplicateName, FormulaSyntaxError
from .nodes import CellRef, Expr, RangeRef
from .parser import (
    MAX_COLUMN,
    MAX_ROW,
    column_index,
    column_letters,
    format_number,
    format_sheet,
    is_valid_name,
    parse_formula,
    print_formula,
)
from .values import EMPTY, Value, kind_of

DEFAULT_SHEET = "Sheet1"

_ADDRESS_RE = re.compile(
    r"""^(?:(?:'(?P<qsheet>(?:[^']|'')+)'|(?P<sheet>[A-Za-z_][A-Za-z0-9_.]*))!)?
        \$?(?P<col>[A-Za-z]{1,3})\$?(?P<row>[0-9]+)$""",
    re.VERBOSE,
)
_NUMBER_RE = re.compile(r"^[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?$")
_CELL_LINE_RE = re.compile(r"^(?P<addr>.+?)\s*:=(?P<content>.*)$")
_NAME_LINE_RE = re.compile(r"^name\s+(?P<name>\S+)\s*:=\s*(?P<target>.+?)\s*$")


@dataclass(frozen=True, order=False)
class CellAddress:
    sheet: str
    column: int
    row: int

    def __post_init__(self):
        if not self.sheet:
            raise BadAddress("sheet name must be non-empty")
        if not (1 <= self.column <= MAX_COLUMN):
            raise BadAddress(f"column {self.column} outside 1..{MAX_COLUMN}")
        if not (1 <= self.row <= MAX_ROW):
            raise BadAddress(f"row {self.row} outside 1..{MAX_ROW}")

    @property
    def sort_key(self):
        return (self.sheet, self.row, self.column)

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    def offset(self, columns: int = 0, rows: int = 0) -> "CellAddress":
        return CellAddress(self.sheet, self.column + columns, self.row + rows)

    def to_ref(self, from_sheet: Optional[str] = None, absolute: bool = False) -> CellRef:
        """A :class:`CellRef` pointing here, sheet-qualified only when it differs from ``from_sheet``."""
        sheet = None if self.sheet == (from_sheet or DEFAULT_SHEET) else self.sheet
        return CellRef(self.column, self.row, absolute, absolute, sheet)

    def __str__(self):
        return format_address(self)


@dataclass(frozen=True)
class RangeAddress:
    start: CellAddress
    end: CellAddress

    def __post_init__(self):
        if self.start.sheet != self.end.sheet:
            raise BadAddress("range endpoints must be on one sheet")

    @property
    def sheet(self) -> str:
        return self.start.sheet

    def cells(self) -> Iterator[CellAddress]:
        for row in range(min(self.start.row, self.end.row), max(self.start.row, self.end.row) + 1):
            for col in range(min(self.start.column, self.end.column), max(self.start.column, self.end.column) + 1):
                yield CellAddress(self.sheet, col, row)

    def to_ref(self, from_sheet: Optional[str] = None) -> RangeRef:
        first = self.start.to_ref(from_sheet)
        return RangeRef(first, CellRef(self.end.column, self.end.row))

    def __str__(self):
        return format_address(self.start) + ":" + format_address(self.end, with_sheet=False)


Target = Union[CellAddress, RangeAddress]


def parse_address(text: str, default_sheet: str = DEFAULT_SHEET) -> CellAddress:
    """``B10`` -> ``CellAddress('Sheet1', 2, 10)``; ``$`` markers are accepted and dropped."""
    m = _ADDRESS_RE.match(text.strip())
    if not m:
        raise BadAddress(f"not a cell address: {text!r}")
    if m.group("qsheet") is not None:
        sheet = m.group("qsheet").replace("''", "'")
    else:
        sheet = m.group("sheet") or default_sheet
    col = column_index(m.group("col"))
    return CellAddress(sheet, col, int(m.group("row")))


def parse_target(text: str, default_sheet: str = DEFAULT_SHEET) -> Target:
    """A single address or an ``A1:B2`` range."""
    text = text.strip()
    # the sheet part may be quoted and contain ':' so split on the last colon only
    head, sep, tail = text.rpartition(":")
    if sep and not tail.endswith("'") and re.match(r"^\$?[A-Za-z]{1,3}\$?[0-9]+$", tail):
        start = parse_address(head, default_sheet)
        end = parse_address(tail, start.sheet)
        return RangeAddress(start, end)
    return parse_address(text, default_sheet)


def format_address(addr: CellAddress, with_sheet: bool = True) -> str:
    prefix = ""
    if with_sheet and addr.sheet != DEFAULT_SHEET:
        prefix = format_sheet(addr.sheet) + "!"
    return f"{prefix}{column_letters(addr.column)}{addr.row}"


def ref_address(ref: CellRef, sheet: str) -> CellAddress:
    """Resolve a reference appearing in a formula that lives on ``sheet``."""
    return CellAddress(ref.sheet or sheet, ref.column, ref.row)


def ref_range(ref: RangeRef, sheet: str) -> RangeAddress:
    start = ref_address(ref.start, sheet)
    end = CellAddress(ref.end.sheet or start.sheet, ref.end.column, ref.end.row)
    return RangeAddress(start, end)


@dataclass(frozen=True)
class Literal:
    value: Value

    def __post_init__(self):
        kind_of(self.value)


@dataclass(frozen=True)
class Formula:
    expr: Expr
    source: str = field(default="")

    def __post_init__(self):
        if not self.source:
            object.__setattr__(self, "source", print_formula(self.expr))

    @classmethod
    def parse(cls, text: str) -> "Formula":
        return cls(parse_formula(text), text if text.startswith("=") else "=" + text)


Cell = Union[Literal, Formula]
EMPTY_CELL = Literal(EMPTY)


@dataclass(frozen=True)
class DefinedName:
    name: str
    target: Target


class Workbook:
    """Mapping of addresses to cells plus case-insensitive defined names.

    A workbook is mutable through :meth:`set_cell` / :meth:`define_name`;
    transforms work on :meth:`copy` so callers keep their original.
    """

    def __init__(self, cells: Optional[dict] = None, names: Optional[dict] = None):
        self.cells: dict[CellAddress, Cell] = {}
        self.names: dict[str, DefinedName] = {}
        for addr, cell in (cells or {}).items():
            self.set_cell(addr, cell)
        for name, target in (names or {}).items():
            self.define_name(name, target)

    @staticmethod
    def _addr(addr) -> CellAddress:
        return parse_address(addr) if isinstance(addr, str) else addr

    def get_cell(self, addr) -> Cell:
        return self.cells.get(self._addr(addr), EMPTY_CELL)

    def set_cell(self, addr, content) -> None:
        """Store ``content``; plain values become literals and ``"=..."`` strings are not parsed."""
        addr = self._addr(addr)
        if not isinstance(content, (Literal, Formula)):
            content = Literal(content)
        if isinstance(content, Literal) and content.value is EMPTY:
            self.cells.pop(addr, None)
        else:
            self.cells[addr] = content

    def set_formula(self, addr, text: str) -> None:
        self.set_cell(addr, Formula.parse(text))

    def is_empty(self, addr) -> bool:
        return self._addr(addr) not in self.cells

    def define_name(self, name: str, target) -> None:
        if not is_valid_name(name):
            raise ValueError(f"invalid defined name: {name!r}")
        if isinstance(target, str):
            target = parse_target(target)
        self.names[name.upper()] = DefinedName(name, target)

    def resolve_name(self, name: str) -> Optional[Target]:
        found = self.names.get(name.upper())
        return found.target if found else None

    def formula_cells(self) -> Iterator[tuple[CellAddress, Formula]]:
        for addr in sorted(self.cells):
            cell = self.cells[addr]
            if isinstance(cell, Formula):
                yield addr, cell

    def copy(self) -> "Workbook":
        wb = Workbook()
        wb.cells = dict(self.cells)
        wb.names = dict(self.names)
        return wb

    def __eq__(self, other):
        if not isinstance(other, Workbook):
            return NotImplemented
        return self.cells == other.cells and self.names == other.names

    def __repr__(self):
        return f"<Workbook {len(self.cells)} cells, {len(self.names)} names>"


# cell-list format


def parse_literal(text: str) -> Value:
    """Type a literal the way cell-list files do.

    >>> parse_literal("5"), parse_literal("true"), parse_literal('""'), parse_literal("MH")
    (5.0, True, '', 'MH')
    """
    if text == "":
        return EMPTY
    if len(text) >= 2 and text[0] == '"' and text[-1] == '"':
        return text[1:-1].replace('""', '"')
    if _NUMBER_RE.match(text):
        return float(text)
    if text.upper() in ("TRUE", "FALSE"):
        return text.upper() == "TRUE"
    return text


def format_literal(value: Value) -> str:
    kind = kind_of(value)
    if kind == "number":
        return format_number(float(value))
    if kind == "boolean":
        return "TRUE" if value else "FALSE"
    if kind == "text":
        if "\n" in value or "\r" in value:
            raise ValueError("line breaks cannot be stored in a cell-list file")
        if (
            value == ""
            or value != value.strip()
            or value.startswith(("=", '"'))
            or _NUMBER_RE.match(value)
            or value.upper() in ("TRUE", "FALSE")
        ):
            return '"' + value.replace('"', '""') + '"'
        return value
    raise ValueError(f"{kind} values cannot be stored as literals")


def load_cell_list(text: str) -> Workbook:
    wb = Workbook()
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _NAME_LINE_RE.match(line)
        if m:
            name = m.group("name")
            if name.upper() in wb.names:
                raise DuplicateName(f"name {name!r} defined twice", lineno)
            try:
                wb.define_name(name, parse_target(m.group("target")))
            except (BadAddress, ValueError) as exc:
                raise CellListSyntaxError(str(exc), lineno) from exc
            continue
        m = _CELL_LINE_RE.match(line)
        if not m:
            raise CellListSyntaxError("expected '<address> := <content>'", lineno)
        try:
            addr = parse_address(m.group("addr"))
        except BadAddress as exc:
            raise CellListSyntaxError(str(exc), lineno) from exc
        if addr in seen:
            raise DuplicateCell(f"cell {format_address(addr)} defined twice", lineno)
        seen.add(addr)
        content = m.group("content").strip()
        if content.startswith("="):
            try:
                wb.set_cell(addr, Formula.parse(content))
            except FormulaSyntaxError as exc:
                raise CellListSyntaxError(f"{format_address(addr)}: {exc}", lineno) from exc
        else:
            wb.set_cell(addr, Literal(parse_literal(content)))
    return wb


def save_cell_list(wb: Workbook) -> str:
    lines = []
    for addr in sorted(wb.cells):
        cell = wb.cells[addr]
        content = cell.source if isinstance(cell, Formula) else format_literal(cell.value)
        lines.append(f"{format_address(addr)} := {content}")
    for key in sorted(wb.names):
        defined = wb.names[key]
        lines.append(f"name {defined.name} := {defined.target}")
    return "\n".join(lines) + ("\n" if lines else "")
