"""Detect nested-IF spreadsheet formulas and refactor them into lookup tables."""

__version__ = "0.1.0"

from .analyzer import (  # noqa: E402
    BranchShape,
    IfChain,
    classify,
    extract_chain,
    find_nested_ifs,
    invert_test,
    normalize_to_branch_on_false,
)
from .evaluator import evaluate_cell, evaluate_expr  # noqa: E402
from .lexer import BACKEND  # noqa: E402
from .parser import count_ifs, nesting_depth, parse_formula, print_formula  # noqa: E402
from .transformer import (  # noqa: E402
    NoGuard,
    Orientation,
    PlacementSpec,
    TransformPlan,
    WrapIfError,
    apply_plan,
    detect_latent_errors,
    plan_lookup_transform,
    plan_visibility_transform,
)
from .verifier import EquivalenceReport, state_equivalence, structural_equivalence  # noqa: E402
from .workbook import CellAddress, Workbook, load_cell_list, parse_address, save_cell_list  # noqa: E402

__all__ = [
    "BACKEND",
    "BranchShape",
    "CellAddress",
    "EquivalenceReport",
    "IfChain",
    "NoGuard",
    "Orientation",
    "PlacementSpec",
    "TransformPlan",
    "Workbook",
    "WrapIfError",
    "apply_plan",
    "classify",
    "count_ifs",
    "detect_latent_errors",
    "evaluate_cell",
    "evaluate_expr",
    "extract_chain",
    "find_nested_ifs",
    "invert_test",
    "load_cell_list",
    "nesting_depth",
    "normalize_to_branch_on_false",
    "parse_address",
    "parse_formula",
    "plan_lookup_transform",
    "plan_visibility_transform",
    "print_formula",
    "save_cell_list",
    "state_equivalence",
    "structural_equivalence",
]
