"""Check that a transform preserved what the source cell computes.

Two checks:

* ``structural_equivalence`` stubs every test with a boolean and every
  outcome with a distinct sentinel number, then compares the nested IF
  against the generated lookup for all ``2**N`` assignments.
* ``state_equivalence`` evaluates both workbooks over the Cartesian product
  of user-supplied driver values and classifies each disagreement.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

from .analyzer import IfChain, invert_test
from .errors import EmptyDrivers
from .evaluator import Evaluator
from .nodes import BoolLit, Expr, FuncCall, NumberLit, TextLit, map_children, unparen
from .transformer import LatentError, Orientation, TransformPlan, WrapIfError, lookup_table_of, _qualify
from .values import ErrorVal, Value, format_value, is_error, same_value, value_to_json
from .workbook import CellAddress, Formula, Literal, Workbook, format_address

DEFAULT_LIMIT = 16
SENTINEL_BASE = 1000


class Status(str, enum.Enum):
    EQUIVALENT = "Equivalent"
    DIVERGENT = "Divergent"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


class DivergenceClass(str, enum.Enum):
    VALUE_MISMATCH = "ValueMismatch"
    ERROR_LATENCY = "ErrorLatency"
    TEST_ERROR_SKIP = "TestErrorSkip"

    def __str__(self):
        return self.value


Assignment = Union[tuple[bool, ...], tuple[tuple[CellAddress, Value], ...]]


@dataclass(frozen=True)
class Divergence:
    assignment: Assignment
    original: Value
    transformed: Value
    kind: DivergenceClass


@dataclass
class EquivalenceReport:
    status: Status
    assignments_checked: int
    divergences: list[Divergence] = field(default_factory=list)
    latent_errors: list[LatentError] = field(default_factory=list)
    reason: Optional[str] = None

    @property
    def equivalent(self) -> bool:
        return self.status is Status.EQUIVALENT

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "assignments_checked": self.assignments_checked,
            "divergences": [
                {
                    "assignment": _assignment_json(d.assignment),
                    "original": value_to_json(d.original),
                    "transformed": value_to_json(d.transformed),
                    "class": d.kind.value,
                }
                for d in self.divergences
            ],
            "latent_errors": [
                {
                    "state": _assignment_json(e.state),
                    "cell": format_address(e.address),
                    "error": e.kind.name,
                }
                for e in self.latent_errors
            ],
            "reason": self.reason,
        }

    def describe(self) -> str:
        lines = [f"{self.status.value}: {self.assignments_checked} assignments checked"]
        if self.reason:
            lines.append(f"  ({self.reason})")
        for d in self.divergences[:20]:
            lines.append(
                f"  {d.kind.value} at {_assignment_text(d.assignment)}: "
                f"original {format_value(d.original)}, transformed {format_value(d.transformed)}"
            )
        if len(self.divergences) > 20:
            lines.append(f"  ... {len(self.divergences) - 20} more")
        for e in self.latent_errors:
            lines.append(f"  latent {e.kind.value} in {format_address(e.address)} at {_assignment_text(e.state)}")
        return "\n".join(lines)


def _assignment_json(a):
    if a and isinstance(a[0], tuple):
        return {format_address(addr): value_to_json(v) for addr, v in a}
    return list(a)


def _assignment_text(a) -> str:
    if a and isinstance(a[0], tuple):
        return "{" + ", ".join(f"{format_address(addr)}={format_value(v)}" for addr, v in a) + "}"
    return "(" + ",".join("T" if b else "F" for b in a) + ")"


def _status(divergences: list) -> Status:
    return Status.DIVERGENT if divergences else Status.EQUIVALENT


# structural oracle


def _canon(expr: Expr, sheet: str) -> Expr:
    return _qualify(_strip_parens(expr), sheet)


def _strip_parens(expr: Expr) -> Expr:
    return map_children(unparen(expr), _strip_parens)


def _substitute(expr: Expr, table: dict, stubs: Sequence[bool], sheet: str) -> Expr:
    """Replace every subtree equal to a chain test with that test's stub."""
    key = _canon(expr, sheet)
    if key in table:
        return BoolLit(stubs[table[key]])
    return map_children(expr, lambda e: _substitute(e, table, stubs, sheet))


def structural_equivalence(chain: IfChain, plan: TransformPlan, limit: int = DEFAULT_LIMIT) -> EquivalenceReport:
    """Exhaustive truth-table comparison of the chain against the plan's lookup table.

    Each generated cell is stubbed according to the formula it actually
    holds, so a plan whose cells were shuffled, dropped or negated shows up
    as a divergence rather than being silently re-aligned.
    """
    n = len(chain.tests)
    if n > limit:
        return EquivalenceReport(Status.INCONCLUSIVE, 0, reason=f"{n} tests exceeds the exhaustive limit of {limit}")
    if plan.mode != "lookup":
        return EquivalenceReport(Status.INCONCLUSIVE, 0, reason="plan has no lookup table")

    chain_sheet = chain.source.sheet if chain.source else plan.source.sheet
    cell_sheet = plan.table_range.sheet if plan.table_range else plan.source.sheet
    test_index = {}
    for k, t in enumerate(chain.tests):
        test_index.setdefault(_canon(t, chain_sheet), k)
    outcome_keys = [_canon(o, chain_sheet) for o in chain.outcomes]

    # how to stub each key cell: ("pos", k), ("neg", k) or ("expr", formula)
    test_stubs = []
    for addr, expr in plan.test_cells:
        if expr is None:
            test_stubs.append((addr, ("const", None)))
            continue
        key = _canon(expr, cell_sheet)
        if key in test_index:
            test_stubs.append((addr, ("pos", test_index[key])))
        elif _canon(invert_test(expr), cell_sheet) in test_index:
            test_stubs.append((addr, ("neg", test_index[_canon(invert_test(expr), cell_sheet)])))
        else:
            test_stubs.append((addr, ("expr", expr)))

    used = set()
    outcome_values = []
    for i, (addr, expr) in enumerate(plan.outcome_cells):
        if expr is not None and isinstance(plan.guard, WrapIfError):
            e = unparen(expr)
            if isinstance(e, FuncCall) and e.name == "IFERROR" and len(e.args) == 2 and e.args[1] == TextLit(plan.guard.flag_text):
                expr = e.args[0]
        key = _canon(expr, cell_sheet) if expr is not None else None
        matches = [k for k, o in enumerate(outcome_keys) if o == key]
        fresh = [k for k in matches if k not in used]
        if fresh:
            used.add(fresh[0])
            outcome_values.append((addr, float(SENTINEL_BASE + fresh[0])))
        elif matches:
            outcome_values.append((addr, float(SENTINEL_BASE + matches[0])))
        else:
            # an outcome the chain never had
            outcome_values.append((addr, float(-1 - i)))

    scratch = Workbook()
    for addr, value in outcome_values:
        scratch.set_cell(addr, Literal(value))
    if plan.otherwise_test_cell is not None:
        addr, expr = plan.otherwise_test_cell
        if isinstance(expr, BoolLit):
            scratch.set_cell(addr, Literal(expr.value))
        elif expr is not None:
            scratch.set_cell(addr, Formula(expr))

    divergences = []
    checked = 0
    for stubs in itertools.product((False, True), repeat=n):
        original = NumberLit(float(SENTINEL_BASE + n))
        for k in range(n - 1, -1, -1):
            original = FuncCall("IF", (BoolLit(stubs[k]), NumberLit(float(SENTINEL_BASE + k)), original))
        expected = Evaluator(Workbook()).expr(original, plan.source.sheet)

        for addr, (how, arg) in test_stubs:
            if how == "pos":
                scratch.set_cell(addr, Literal(stubs[arg]))
            elif how == "neg":
                scratch.set_cell(addr, Literal(not stubs[arg]))
            elif how == "expr":
                scratch.set_cell(addr, Formula(_substitute(arg, test_index, stubs, cell_sheet)))
        got = Evaluator(scratch).expr(plan.result_formula, plan.source.sheet)
        checked += 1
        if not same_value(expected, got):
            divergences.append(Divergence(stubs, expected, got, DivergenceClass.VALUE_MISMATCH))
    return EquivalenceReport(_status(divergences), checked, divergences)


# state sweep


def _key_cells(workbook: Workbook, result_cell: CellAddress) -> list[CellAddress]:
    """The first-column (or first-row) cells of the lookup table at ``result_cell``."""
    found = lookup_table_of(workbook, result_cell)
    if found is None:
        return []
    orientation, table = found
    top = min(table.start.row, table.end.row)
    left = min(table.start.column, table.end.column)
    if orientation is Orientation.VERTICAL:
        rows = range(top, max(table.start.row, table.end.row) + 1)
        return [CellAddress(table.sheet, left, r) for r in rows]
    cols = range(left, max(table.start.column, table.end.column) + 1)
    return [CellAddress(table.sheet, c, top) for c in cols]


def compare_states(
    original_wb: Workbook,
    transformed_wb: Workbook,
    result_cell: CellAddress,
    states: Sequence[Mapping[CellAddress, Value]],
) -> EquivalenceReport:
    """Evaluate ``result_cell`` in both workbooks under each state and classify disagreements."""
    drivers = set()
    for state in states:
        drivers.update(state)
    generated = sorted(
        addr
        for addr, cell in transformed_wb.cells.items()
        if addr != result_cell
        and addr not in drivers
        and isinstance(cell, Formula)
        and original_wb.get_cell(addr) != cell
    )
    keys = _key_cells(transformed_wb, result_cell)

    divergences = []
    latent = []
    for state in states:
        frozen = tuple(state.items())
        before = original_wb.copy()
        after = transformed_wb.copy()
        for addr, value in state.items():
            before.set_cell(addr, Literal(value))
            after.set_cell(addr, Literal(value))
        ev_before = Evaluator(before)
        ev_after = Evaluator(after)
        vo = ev_before.cell(result_cell)
        vt = ev_after.cell(result_cell)
        if not same_value(vo, vt):
            if any(is_error(ev_after.cell(k)) for k in keys):
                kind = DivergenceClass.TEST_ERROR_SKIP
            elif is_error(vo) != is_error(vt):
                kind = DivergenceClass.ERROR_LATENCY
            else:
                kind = DivergenceClass.VALUE_MISMATCH
            divergences.append(Divergence(frozen, vo, vt, kind))
        if not is_error(vt):
            for addr in generated:
                v = ev_after.cell(addr)
                if isinstance(v, ErrorVal):
                    latent.append(LatentError(frozen, addr, v.kind))
    return EquivalenceReport(_status(divergences), len(states), divergences, latent)


def state_equivalence(
    original_wb: Workbook,
    transformed_wb: Workbook,
    result_cell: CellAddress,
    drivers: Mapping[CellAddress, Sequence[Value]],
) -> EquivalenceReport:
    """Sweep the Cartesian product of driver values, in the order given."""
    if not drivers or any(len(v) == 0 for v in drivers.values()):
        raise EmptyDrivers("every driver needs at least one value")
    addrs = list(drivers)
    states = [dict(zip(addrs, combo)) for combo in itertools.product(*(drivers[a] for a in addrs))]
    return compare_states(original_wb, transformed_wb, result_cell, states)


__all__ = [
    "DEFAULT_LIMIT",
    "Divergence",
    "DivergenceClass",
    "EquivalenceReport",
    "SENTINEL_BASE",
    "Status",
    "compare_states",
    "state_equivalence",
    "structural_equivalence",
]
