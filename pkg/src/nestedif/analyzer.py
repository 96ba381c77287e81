"""Find nested-IF formulas and reduce them to linear test/outcome chains.

A chain level is an IF whose value argument is itself an IF (parentheses
around it are looked through). An IF buried inside an arithmetic outcome,
e.g. ``1 + IF(...)``, is part of an opaque outcome and not a level.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .errors import ComplexChain, NotAnIf, NotNormalized
from .nodes import BinaryOp, BoolLit, Expr, FuncCall, is_if, unparen
from .parser import count_ifs, nesting_depth
from .workbook import CellAddress, Workbook

_INVERSE = {"=": "<>", "<>": "=", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}


class BranchShape(str, enum.Enum):
    BRANCH_ON_FALSE = "BranchOnFalse"
    BRANCH_ON_TRUE = "BranchOnTrue"
    MIXED = "Mixed"
    COMPLEX = "Complex"

    def __str__(self):
        return self.value

    @property
    def transformable(self) -> bool:
        return self is not BranchShape.COMPLEX


@dataclass(frozen=True)
class IfChain:
    """A branch-on-false chain: ``IF(t0, o0, IF(t1, o1, ... on))``."""

    tests: tuple[Expr, ...]
    outcomes: tuple[Expr, ...]
    source: Optional[CellAddress] = None
    if_count: int = 0
    depth: int = 0
    shape: BranchShape = BranchShape.BRANCH_ON_FALSE

    def __post_init__(self):
        if len(self.outcomes) != len(self.tests) + 1:
            raise ValueError("a chain needs exactly one more outcome than tests")

    def __len__(self):
        return len(self.tests)

    def to_expr(self) -> Expr:
        """Rebuild the nested IF this chain describes."""
        expr = self.outcomes[-1]
        for test, outcome in zip(reversed(self.tests), reversed(self.outcomes[:-1])):
            expr = FuncCall("IF", (test, outcome, expr))
        return expr


@dataclass(frozen=True)
class NestedIfHit:
    address: CellAddress
    if_count: int
    depth: int
    shape: BranchShape


def _if_args(node: Expr) -> Optional[tuple[Expr, Expr, Expr]]:
    """``(test, if_true, if_false)`` for a well-formed IF; a missing else is FALSE."""
    node = unparen(node)
    if not is_if(node) or len(node.args) not in (2, 3):
        return None
    if_false = node.args[2] if len(node.args) == 3 else BoolLit(False)
    return node.args[0], node.args[1], if_false


def _is_level(node: Expr) -> bool:
    return _if_args(node) is not None


def complex_node(expr: Expr) -> Optional[Expr]:
    """The first IF along the chain that holds IFs in both value positions."""
    node = expr
    while True:
        args = _if_args(node)
        if args is None:
            return None
        _, on_true, on_false = args
        t, f = _is_level(on_true), _is_level(on_false)
        if t and f:
            return unparen(node)
        if t:
            node = on_true
        elif f:
            node = on_false
        else:
            return None


def classify(expr: Expr) -> BranchShape:
    if _if_args(expr) is None:
        raise NotAnIf("formula root is not an IF call")
    seen_true = seen_false = False
    node = expr
    while True:
        args = _if_args(node)
        if args is None:
            break
        _, on_true, on_false = args
        t, f = _is_level(on_true), _is_level(on_false)
        if t and f:
            return BranchShape.COMPLEX
        if t:
            seen_true = True
            node = on_true
        elif f:
            seen_false = True
            node = on_false
        else:
            break
    if seen_true and seen_false:
        return BranchShape.MIXED
    if seen_true:
        return BranchShape.BRANCH_ON_TRUE
    return BranchShape.BRANCH_ON_FALSE


def invert_test(expr: Expr) -> Expr:
    """Logical negation by flipping a comparison, unwrapping NOT, or wrapping in NOT."""
    node = unparen(expr)
    if isinstance(node, BinaryOp) and node.op in _INVERSE:
        return BinaryOp(_INVERSE[node.op], node.left, node.right, span=node.span)
    if isinstance(node, FuncCall) and node.name == "NOT" and len(node.args) == 1:
        return node.args[0]
    return FuncCall("NOT", (expr,))


def normalize_to_branch_on_false(expr: Expr) -> Expr:
    """Rewrite every branch-on-true level ``IF(t, IF.., v)`` as ``IF(not t, v, IF..)``."""
    shape = classify(expr)
    if shape is BranchShape.COMPLEX:
        node = complex_node(expr)
        raise ComplexChain("IF with nested IFs in both value positions", node.span if node else None)
    if shape is BranchShape.BRANCH_ON_FALSE:
        return expr
    return _normalize(expr)


def _normalize(node: Expr) -> Expr:
    args = _if_args(node)
    if args is None:
        return node
    test, on_true, on_false = args
    if _is_level(on_true):
        return FuncCall("IF", (invert_test(test), on_false, _normalize(on_true)))
    if _is_level(on_false):
        return FuncCall("IF", (test, on_true, _normalize(on_false)))
    return node


def extract_chain(expr: Expr, source: Optional[CellAddress] = None) -> IfChain:
    tests, outcomes = [], []
    node = expr
    while True:
        args = _if_args(node)
        if args is None:
            raise NotAnIf("chain level is not an IF call")
        test, on_true, on_false = args
        if _is_level(on_true):
            raise NotNormalized("branch-on-true level found; normalize first")
        tests.append(test)
        outcomes.append(on_true)
        if _is_level(on_false):
            node = on_false
            continue
        outcomes.append(on_false)
        break
    return IfChain(
        tuple(tests),
        tuple(outcomes),
        source=source,
        if_count=count_ifs(expr),
        depth=nesting_depth(expr),
    )


def chain_for(expr: Expr, source: Optional[CellAddress] = None) -> IfChain:
    """Normalize then extract, keeping the metrics of the original formula."""
    normalized = normalize_to_branch_on_false(expr)
    chain = extract_chain(normalized, source)
    return IfChain(chain.tests, chain.outcomes, source, count_ifs(expr), nesting_depth(expr))


def shape_of_formula(expr: Expr) -> BranchShape:
    """Shape for reporting; an IF chain embedded in a larger expression is not transformable."""
    if _if_args(expr) is None:
        return BranchShape.COMPLEX
    return classify(expr)


def find_nested_ifs(workbook: Workbook, min_if_count: int = 2) -> list[NestedIfHit]:
    if min_if_count < 1:
        raise ValueError("min_if_count must be at least 1")
    hits = []
    for addr, cell in workbook.formula_cells():
        n = count_ifs(cell.expr)
        if n >= min_if_count:
            hits.append(NestedIfHit(addr, n, nesting_depth(cell.expr), shape_of_formula(cell.expr)))
    return hits


__all__ = [
    "BranchShape",
    "IfChain",
    "NestedIfHit",
    "chain_for",
    "classify",
    "complex_node",
    "extract_chain",
    "find_nested_ifs",
    "invert_test",
    "normalize_to_branch_on_false",
    "shape_of_formula",
]
