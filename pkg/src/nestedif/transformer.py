"""Rewrite a nested-IF cell into visible test/outcome cells and one lookup.

Lookup mode builds a two-column (or two-row) table: each logical test next
to the outcome it selects, a literal ``TRUE`` in the last key cell so the
final outcome acts as "otherwise", and ``VLOOKUP(TRUE, table, 2, FALSE)`` in
place of the original formula. Visibility mode only moves tests and outcomes
into cells and keeps the IF structure, which also works for trees that have
IFs on both sides of a branch.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence, Union

from .analyzer import BranchShape, IfChain, chain_for, complex_node, shape_of_formula
from .errors import BadAddress, ComplexChain, NotAFormula, NotAnIf, PlacementCollision
from .evaluator import Evaluator
from .nodes import BoolLit, CellRef, Expr, FuncCall, NameRef, NumberLit, RangeRef, TextLit, map_children, unparen, walk
from .parser import count_ifs, print_formula
from .values import ErrorKind, ErrorVal, Value, kind_of
from .workbook import (
    CellAddress,
    Formula,
    Literal,
    RangeAddress,
    Workbook,
    format_address,
    ref_address,
    ref_range,
)

DEFAULT_FLAG_TEXT = "#LATENT!"


class Orientation(str, enum.Enum):
    VERTICAL = "v"
    HORIZONTAL = "h"


@dataclass(frozen=True)
class PlacementSpec:
    """Where generated cells go. ``anchor=None`` picks a default beside the inputs."""

    anchor: Optional[CellAddress] = None
    orientation: Orientation = Orientation.VERTICAL
    use_names: bool = False
    label_column: bool = True


@dataclass(frozen=True)
class NoGuard:
    pass


@dataclass(frozen=True)
class WrapIfError:
    flag_text: str = DEFAULT_FLAG_TEXT


GuardPolicy = Union[NoGuard, WrapIfError]


@dataclass(frozen=True)
class TransformPlan:
    mode: str
    source: CellAddress
    original: Formula
    chain: Optional[IfChain]
    test_cells: tuple[tuple[CellAddress, Expr], ...]
    outcome_cells: tuple[tuple[CellAddress, Expr], ...]
    otherwise_test_cell: Optional[tuple[CellAddress, Expr]]
    table_range: Optional[RangeAddress]
    result_formula: Expr
    guard: GuardPolicy = field(default_factory=NoGuard)
    orientation: Orientation = Orientation.VERTICAL
    label_cells: tuple[tuple[CellAddress, str], ...] = ()
    names: tuple[tuple[str, CellAddress], ...] = ()

    @property
    def generated_cell_count(self) -> int:
        """Tests, outcomes and the rewritten result cell; the TRUE key and labels are extra."""
        return len(self.test_cells) + len(self.outcome_cells) + 1

    def region(self) -> list[CellAddress]:
        """Every address the plan writes besides the source cell."""
        cells = [a for a, _ in self.test_cells]
        if self.otherwise_test_cell is not None:
            cells.append(self.otherwise_test_cell[0])
        cells.extend(a for a, _ in self.outcome_cells)
        cells.extend(a for a, _ in self.label_cells)
        return cells

    def summary(self) -> str:
        lines = [
            f"mode: {self.mode}",
            f"source: {format_address(self.source)}",
            f"tests: {len(self.test_cells)}  outcomes: {len(self.outcome_cells)}",
            f"cells written: {len(self.test_cells) + len(self.outcome_cells)} (+1 rewritten source)",
        ]
        if self.table_range is not None:
            lines.append(f"table: {self.table_range}")
        lines.append(f"result: {format_address(self.source)} := {print_formula(self.result_formula)}")
        return "\n".join(lines)


@dataclass(frozen=True)
class LatentError:
    state: tuple[tuple[CellAddress, Value], ...]
    address: CellAddress
    kind: ErrorKind


# helpers


def _qualify(expr: Expr, sheet: str) -> Expr:
    """Pin every unqualified reference in ``expr`` to ``sheet``."""
    if isinstance(expr, CellRef):
        return expr if expr.sheet else replace(expr, sheet=sheet)
    if isinstance(expr, RangeRef):
        return replace(expr, start=_qualify(expr.start, sheet))
    return map_children(expr, lambda e: _qualify(e, sheet))


def _relocate(expr: Expr, from_sheet: str, to_sheet: str) -> Expr:
    return expr if from_sheet == to_sheet else _qualify(expr, from_sheet)


def _source_formula(workbook: Workbook, source: CellAddress) -> Formula:
    cell = workbook.get_cell(source)
    if not isinstance(cell, Formula):
        raise NotAFormula(f"{format_address(source)} does not hold a formula")
    return cell


def default_anchor(workbook: Workbook, source: CellAddress, expr: Expr) -> CellAddress:
    """Two columns right of the rightmost column the formula reads, on the source row."""
    cols = [ref_address(r, source.sheet).column for r in walk(expr) if isinstance(r, CellRef)]
    col = (max(cols) if cols else source.column) + 2
    return CellAddress(source.sheet, col, source.row)


class _Layout:
    """Maps (across, down) table coordinates to addresses for either orientation."""

    def __init__(self, anchor: CellAddress, orientation: Orientation):
        self.anchor = anchor
        self.orientation = orientation

    def at(self, across: int, down: int) -> CellAddress:
        if self.orientation is Orientation.HORIZONTAL:
            across, down = down, across
        return CellAddress(self.anchor.sheet, self.anchor.column + across, self.anchor.row + down)


def _lookup_cells(layout: _Layout, n: int, labels: bool):
    tests = [layout.at(0, i) for i in range(n)]
    otherwise = layout.at(0, n)
    outcomes = [layout.at(1, i) for i in range(n + 1)]
    label_cells = []
    if labels:
        label_cells += [
            (layout.at(-1, -2), "Logical Tests"),
            (layout.at(1, -2), "Outcomes"),
            (layout.at(-1, -1), "Name"),
            (layout.at(0, -1), "Value"),
            (layout.at(1, -1), "Value"),
            (layout.at(2, -1), "Name"),
        ]
        label_cells += [(layout.at(-1, i), f"Test{i + 1}") for i in range(n)]
        label_cells.append((layout.at(-1, n), "(otherwise)"))
        label_cells += [(layout.at(2, i), f"Value{i + 1}") for i in range(n + 1)]
    return tests, otherwise, outcomes, label_cells


def _collisions(workbook: Workbook, plan: TransformPlan) -> list[str]:
    blocking = [format_address(a) for a in plan.region() if a == plan.source or not workbook.is_empty(a)]
    for name, _ in plan.names:
        if workbook.resolve_name(name) is not None:
            blocking.append(f"name {name}")
    return blocking


def _place(build, workbook: Workbook, source: CellAddress, placement: PlacementSpec, expr: Expr):
    """Call ``build(anchor)``; with no explicit anchor, walk down until the region is free."""
    if placement.anchor is not None:
        try:
            plan = build(placement.anchor)
        except BadAddress as exc:
            raise PlacementCollision([f"region leaves the grid ({exc})"]) from exc
        blocking = _collisions(workbook, plan)
        if blocking:
            raise PlacementCollision(blocking)
        return plan
    anchor = default_anchor(workbook, source, expr)
    # leave room for the label strip above/left of the table
    if placement.label_column:
        if placement.orientation is Orientation.VERTICAL:
            anchor = CellAddress(anchor.sheet, max(anchor.column, 2), max(anchor.row, 3))
        else:
            anchor = CellAddress(anchor.sheet, max(anchor.column, 3), max(anchor.row, 2))
    last_error = None
    for _ in range(10000):
        try:
            plan = build(anchor)
        except BadAddress as exc:
            raise PlacementCollision([f"region leaves the grid ({exc})"]) from exc
        blocking = _collisions(workbook, plan)
        if not blocking:
            return plan
        last_error = blocking
        anchor = anchor.offset(rows=1)
    raise PlacementCollision(last_error or [])


def _guarded(expr: Expr, guard: GuardPolicy) -> Expr:
    if isinstance(guard, WrapIfError):
        return FuncCall("IFERROR", (expr, TextLit(guard.flag_text)))
    return expr


# planning


def plan_lookup_transform(
    workbook: Workbook,
    source: CellAddress,
    placement: PlacementSpec = PlacementSpec(),
    guard: GuardPolicy = NoGuard(),
) -> TransformPlan:
    original = _source_formula(workbook, source)
    expr = original.expr
    if count_ifs(expr) == 0:
        raise NotAnIf(f"{format_address(source)} holds no IF")
    if shape_of_formula(expr) is BranchShape.COMPLEX:
        node = complex_node(expr)
        if node is None:
            raise ComplexChain(
                "the IF chain is embedded in a larger expression; the lookup technique is not "
                "applicable (try visibility mode)",
                expr.span,
            )
        raise ComplexChain(
            "an IF has nested IFs in both value positions; the lookup technique is not "
            "applicable (try visibility mode)",
            node.span,
        )
    chain = chain_for(expr, source)
    n = len(chain.tests)

    def build(anchor: CellAddress) -> TransformPlan:
        layout = _Layout(anchor, placement.orientation)
        tests, otherwise, outcomes, labels = _lookup_cells(layout, n, placement.label_column)
        move = lambda e: _relocate(e, source.sheet, anchor.sheet)  # noqa: E731
        table = RangeAddress(tests[0], outcomes[-1])
        fn = "VLOOKUP" if placement.orientation is Orientation.VERTICAL else "HLOOKUP"
        result = FuncCall(fn, (BoolLit(True), table.to_ref(source.sheet), NumberLit(2.0), BoolLit(False)))
        names = ()
        if placement.use_names:
            names = tuple((f"Test{i + 1}", a) for i, a in enumerate(tests)) + tuple(
                (f"Value{i + 1}", a) for i, a in enumerate(outcomes)
            )
        return TransformPlan(
            mode="lookup",
            source=source,
            original=original,
            chain=chain,
            test_cells=tuple((a, move(t)) for a, t in zip(tests, chain.tests)),
            outcome_cells=tuple((a, _guarded(move(o), guard)) for a, o in zip(outcomes, chain.outcomes)),
            otherwise_test_cell=(otherwise, BoolLit(True)),
            table_range=table,
            result_formula=result,
            guard=guard,
            orientation=placement.orientation,
            label_cells=tuple(labels),
            names=names,
        )

    return _place(build, workbook, source, placement, expr)


def plan_visibility_transform(
    workbook: Workbook,
    source: CellAddress,
    placement: PlacementSpec = PlacementSpec(),
    guard: GuardPolicy = NoGuard(),
) -> TransformPlan:
    """Move every test and leaf outcome of the IF tree into its own cell; keep the IFs."""
    original = _source_formula(workbook, source)
    expr = original.expr
    if count_ifs(expr) == 0:
        raise NotAnIf(f"{format_address(source)} holds no IF")

    tests: list[Expr] = []
    outcomes: list[Expr] = []

    def has_if(e: Expr) -> bool:
        return count_ifs(e) > 0

    # Each extracted piece is replaced by a placeholder naming its slot; the
    # placeholders are swapped for real references once the anchor is known.
    def extract(e: Expr, bucket: list, tag: str) -> Expr:
        bucket.append(e)
        return NameRef(f"\x00{tag}{len(bucket) - 1}")

    def rewrite(e: Expr) -> Expr:
        node = unparen(e)
        if isinstance(node, FuncCall) and node.name == "IF" and len(node.args) in (2, 3):
            test = node.args[0]
            new_test = rewrite(test) if has_if(test) else extract(test, tests, "t")
            new_values = [rewrite(v) if has_if(v) else extract(v, outcomes, "o") for v in node.args[1:]]
            return replace(node, args=(new_test, *new_values))
        return map_children(e, rewrite)

    skeleton = rewrite(expr)

    def build(anchor: CellAddress) -> TransformPlan:
        layout = _Layout(anchor, placement.orientation)
        t_addrs = [layout.at(0, i) for i in range(len(tests))]
        o_addrs = [layout.at(0, len(tests) + 1 + j) for j in range(len(outcomes))]
        labels = []
        if placement.label_column:
            labels.append((layout.at(-1, -1), "Logical Tests"))
            labels += [(layout.at(-1, i), f"Test{i + 1}") for i in range(len(tests))]
            labels.append((layout.at(-1, len(tests)), "Outcomes"))
            labels += [(layout.at(-1, len(tests) + 1 + j), f"Value{j + 1}") for j in range(len(outcomes))]
        names = ()
        if placement.use_names:
            names = tuple((f"Test{i + 1}", a) for i, a in enumerate(t_addrs)) + tuple(
                (f"Value{j + 1}", a) for j, a in enumerate(o_addrs)
            )
        lookup = {}
        for i, a in enumerate(t_addrs):
            lookup[f"\x00t{i}"] = NameRef(f"Test{i + 1}") if placement.use_names else a.to_ref(source.sheet)
        for j, a in enumerate(o_addrs):
            lookup[f"\x00o{j}"] = NameRef(f"Value{j + 1}") if placement.use_names else a.to_ref(source.sheet)

        def fill(e: Expr) -> Expr:
            if isinstance(e, NameRef) and e.name in lookup:
                return lookup[e.name]
            return map_children(e, fill)

        move = lambda e: _relocate(e, source.sheet, anchor.sheet)  # noqa: E731
        return TransformPlan(
            mode="visibility",
            source=source,
            original=original,
            chain=None,
            test_cells=tuple((a, move(t)) for a, t in zip(t_addrs, tests)),
            outcome_cells=tuple((a, _guarded(move(o), guard)) for a, o in zip(o_addrs, outcomes)),
            otherwise_test_cell=None,
            table_range=None,
            result_formula=fill(skeleton),
            guard=guard,
            orientation=placement.orientation,
            label_cells=tuple(labels),
            names=names,
        )

    return _place(build, workbook, source, placement, expr)


def apply_plan(workbook: Workbook, plan: TransformPlan) -> Workbook:
    """Return a new workbook with the plan written; ``workbook`` is not modified."""
    blocking = _collisions(workbook, plan)
    if blocking:
        raise PlacementCollision(blocking)
    out = workbook.copy()
    for addr, expr in plan.test_cells:
        out.set_cell(addr, Formula(expr))
    if plan.otherwise_test_cell is not None:
        addr, expr = plan.otherwise_test_cell
        if isinstance(expr, BoolLit):
            out.set_cell(addr, Literal(expr.value))
        else:
            out.set_cell(addr, Formula(expr))
    for addr, expr in plan.outcome_cells:
        out.set_cell(addr, Formula(expr))
    for addr, text in plan.label_cells:
        out.set_cell(addr, Literal(text))
    for name, addr in plan.names:
        out.define_name(name, addr)
    out.set_cell(plan.source, Formula(plan.result_formula))
    return out


def detect_latent_errors(
    workbook: Workbook,
    plan: TransformPlan,
    states: Optional[Sequence[Mapping[CellAddress, Value]]] = None,
) -> list[LatentError]:
    """Generated cells that hold an error while the result cell does not.

    ``states`` are driver assignments applied on top of ``workbook``; by
    default only the workbook as it stands is checked.
    """
    found = []
    generated = [a for a, _ in plan.test_cells] + [a for a, _ in plan.outcome_cells]
    for state in states if states is not None else [{}]:
        wb = workbook.copy()
        for addr, value in state.items():
            wb.set_cell(addr, Literal(value))
        ev = Evaluator(wb)
        if isinstance(ev.cell(plan.source), ErrorVal):
            continue
        frozen = tuple(state.items())
        for addr in generated:
            v = ev.cell(addr)
            if isinstance(v, ErrorVal):
                found.append(LatentError(frozen, addr, v.kind))
    return found


def _cell_expr(workbook: Workbook, addr: CellAddress) -> Optional[Expr]:
    cell = workbook.get_cell(addr)
    if isinstance(cell, Formula):
        return cell.expr
    return literal_expr(cell.value)


def literal_expr(value: Value) -> Optional[Expr]:
    kind = kind_of(value)
    if kind == "number":
        return NumberLit(float(value))
    if kind == "text":
        return TextLit(value)
    if kind == "boolean":
        return BoolLit(value)
    return None


def lookup_table_of(workbook: Workbook, source: CellAddress):
    """``(orientation, table)`` if ``source`` holds ``V/HLOOKUP(TRUE, range, 2, FALSE)``, else None."""
    cell = workbook.get_cell(source)
    if not isinstance(cell, Formula):
        return None
    e = unparen(cell.expr)
    if not (isinstance(e, FuncCall) and e.name in ("VLOOKUP", "HLOOKUP") and len(e.args) == 4):
        return None
    key, table, index, mode = (unparen(a) for a in e.args)
    if not (isinstance(key, BoolLit) and key.value and isinstance(table, RangeRef)):
        return None
    if not (isinstance(index, NumberLit) and index.value == 2 and isinstance(mode, BoolLit) and not mode.value):
        return None
    orientation = Orientation.VERTICAL if e.name == "VLOOKUP" else Orientation.HORIZONTAL
    return orientation, ref_range(table, source.sheet)


def recover_plan(
    transformed: Workbook,
    source: CellAddress,
    chain: Optional[IfChain] = None,
    guard: GuardPolicy = NoGuard(),
) -> Optional[TransformPlan]:
    """Rebuild a lookup plan from a transformed workbook, or None if ``source`` is not a lookup."""
    found = lookup_table_of(transformed, source)
    if found is None:
        return None
    orientation, table = found
    top = min(table.start.row, table.end.row)
    left = min(table.start.column, table.end.column)
    layout = _Layout(CellAddress(table.sheet, left, top), orientation)
    if orientation is Orientation.VERTICAL:
        size = abs(table.end.row - table.start.row) + 1
        width = abs(table.end.column - table.start.column) + 1
    else:
        size = abs(table.end.column - table.start.column) + 1
        width = abs(table.end.row - table.start.row) + 1
    if size < 2 or width < 2:
        return None
    keys = [layout.at(0, i) for i in range(size)]
    values = [layout.at(1, i) for i in range(size)]
    result_cell = transformed.get_cell(source)
    return TransformPlan(
        mode="lookup",
        source=source,
        original=result_cell,
        chain=chain,
        test_cells=tuple((a, _cell_expr(transformed, a)) for a in keys[:-1]),
        outcome_cells=tuple((a, _cell_expr(transformed, a)) for a in values),
        otherwise_test_cell=(keys[-1], _cell_expr(transformed, keys[-1])),
        table_range=table,
        result_formula=result_cell.expr,
        guard=guard,
        orientation=orientation,
    )


__all__ = [
    "DEFAULT_FLAG_TEXT",
    "GuardPolicy",
    "LatentError",
    "NoGuard",
    "Orientation",
    "PlacementSpec",
    "TransformPlan",
    "WrapIfError",
    "apply_plan",
    "default_anchor",
    "detect_latent_errors",
    "literal_expr",
    "lookup_table_of",
    "plan_lookup_transform",
    "plan_visibility_transform",
    "recover_plan",
]
