import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings

import oracles
from conftest import COMPLEX_FORMULA, load_fixture
from nestedif.analyzer import IfChain
from nestedif.errors import ComplexChain, NotAFormula, NotAnIf, PlacementCollision
from nestedif.evaluator import evaluate_cell
from nestedif.nodes import BoolLit, FuncCall, walk
from nestedif.parser import count_ifs, format_expr, print_formula
from nestedif.transformer import (
    NoGuard,
    Orientation,
    PlacementSpec,
    WrapIfError,
    apply_plan,
    detect_latent_errors,
    plan_lookup_transform,
    plan_visibility_transform,
)
from nestedif.values import ErrorKind
from nestedif.workbook import Formula, Literal, Workbook, parse_address
from strategies import chains

B5 = parse_address("B5")
E12 = parse_address("E12")


def fig5_plan(wb, **kw):
    return plan_lookup_transform(wb, B5, PlacementSpec(anchor=E12, **kw), NoGuard())


def close(value, fraction):
    return isinstance(value, float) and abs(value - float(fraction)) <= 1e-9


def test_fig5_plan(fig1):
    plan = fig5_plan(fig1)
    assert [str(a) for a, _ in plan.test_cells] == ["E12", "E13", "E14", "E15", "E16"]
    assert [format_expr(e) for _, e in plan.test_cells] == [
        'B10="Rev"', 'B10="Units"', 'B10="MH"', 'B10="MC"', 'B11=""'
    ]
    assert str(plan.otherwise_test_cell[0]) == "E17"
    assert format_expr(plan.otherwise_test_cell[1]) == "TRUE"
    assert [str(a) for a, _ in plan.outcome_cells] == ["F12", "F13", "F14", "F15", "F16", "F17"]
    assert [format_expr(e) for _, e in plan.outcome_cells] == [
        "B14*B15/B16", "B14*B17/B18", "B14*B19/B20", "B14*B21/B22", '""', '"not correct Alloc."'
    ]
    assert print_formula(plan.result_formula) == "=VLOOKUP(TRUE, E12:F17, 2, FALSE)"


def test_cell_count_and_zero_ifs(fig1):
    plan = fig5_plan(fig1)
    assert plan.generated_cell_count == 12
    assert count_ifs(plan.result_formula) == 0
    calls = [n for n in walk(plan.result_formula) if isinstance(n, FuncCall)]
    assert len(calls) == 1 and calls[0].args[3] == BoolLit(False)


def test_row_alignment(fig1):
    plan = fig5_plan(fig1)
    for (t, _), (o, _) in zip(plan.test_cells, plan.outcome_cells):
        assert t.row == o.row and o.column == t.column + 1
    assert plan.otherwise_test_cell[0].row == plan.outcome_cells[-1][0].row


def test_apply_evaluates(fig1):
    after = apply_plan(fig1, fig5_plan(fig1))
    assert close(evaluate_cell(after, B5), Fraction(25, 6))
    assert after.get_cell(parse_address("E17")) == Literal(True)
    after.set_cell(parse_address("B10"), Literal("Units"))
    assert close(evaluate_cell(after, B5), Fraction(15, 4))


def test_outcome_cells_match_oracle(fig1):
    after = apply_plan(fig1, fig5_plan(fig1))
    for (addr, _), want in zip(fig5_plan(fig1).outcome_cells, oracles.fig1_outcomes()):
        got = evaluate_cell(after, addr)
        assert close(got, want) if isinstance(want, Fraction) else got == want


def test_apply_does_not_mutate_input(fig1):
    before = fig1.copy()
    apply_plan(fig1, fig5_plan(fig1))
    assert fig1 == before


def test_second_apply_collides(fig1):
    plan = fig5_plan(fig1)
    once = apply_plan(fig1, plan)
    with pytest.raises(PlacementCollision):
        apply_plan(once, plan)


def test_collision_at_plan_time(fig1):
    with pytest.raises(PlacementCollision):
        plan_lookup_transform(fig1, B5, PlacementSpec(anchor=parse_address("B12")), NoGuard())


def test_labels(fig1):
    plan = fig5_plan(fig1)
    labels = {str(a): t for a, t in plan.label_cells}
    assert labels["D17"] == "(otherwise)"
    assert labels["D12"] == "Test1"
    assert labels["G12"] == "Value1" and labels["G17"] == "Value6"
    assert labels["D10"] == "Logical Tests" and labels["F10"] == "Outcomes"
    no_labels = fig5_plan(fig1, label_column=False)
    assert no_labels.label_cells == ()


def test_default_anchor_is_beside_inputs(fig1):
    plan = plan_lookup_transform(fig1, B5, PlacementSpec(), NoGuard())
    assert plan.test_cells[0][0].column == 4  # two right of column B
    after = apply_plan(fig1, plan)
    assert close(evaluate_cell(after, B5), Fraction(25, 6))


def test_degenerate_chain():
    wb = Workbook()
    wb.set_formula(parse_address("B1"), "=IF(A1>0, 1, 2)")
    plan = plan_lookup_transform(wb, parse_address("B1"), PlacementSpec(anchor=parse_address("D1"), label_column=False), NoGuard())
    assert len(plan.test_cells) == 1 and len(plan.outcome_cells) == 2
    assert print_formula(plan.result_formula) == "=VLOOKUP(TRUE, D1:E2, 2, FALSE)"
    after = apply_plan(wb, plan)
    assert evaluate_cell(after, parse_address("B1")) == 2.0
    after.set_cell(parse_address("A1"), Literal(3.0))
    assert evaluate_cell(after, parse_address("B1")) == 1.0


def test_horizontal(fig1):
    plan = fig5_plan(fig1, orientation=Orientation.HORIZONTAL)
    assert [str(a) for a, _ in plan.test_cells] == ["E12", "F12", "G12", "H12", "I12"]
    assert str(plan.outcome_cells[0][0]) == "E13"
    assert print_formula(plan.result_formula) == "=HLOOKUP(TRUE, E12:J13, 2, FALSE)"
    assert close(evaluate_cell(apply_plan(fig1, plan), B5), Fraction(25, 6))


def test_names(fig1):
    plan = fig5_plan(fig1, use_names=True)
    after = apply_plan(fig1, plan)
    assert str(after.resolve_name("Test3")) == "E14"
    assert str(after.resolve_name("Value6")) == "F17"
    assert close(evaluate_cell(after, B5), Fraction(25, 6))


def test_refusals(fig1):
    wb = load_fixture("complex.cells")
    with pytest.raises(ComplexChain):
        plan_lookup_transform(wb, parse_address("A1"), PlacementSpec(), NoGuard())
    with pytest.raises(NotAFormula):
        plan_lookup_transform(fig1, parse_address("B10"), PlacementSpec(), NoGuard())
    fig1.set_formula(parse_address("C1"), "=B14+1")
    with pytest.raises(NotAnIf):
        plan_lookup_transform(fig1, parse_address("C1"), PlacementSpec(), NoGuard())


def test_branch_on_true_source_is_normalized():
    wb = load_fixture("branch_on_true.cells")
    src = parse_address("B1")
    plan = plan_lookup_transform(wb, src, PlacementSpec(label_column=False), NoGuard())
    after = apply_plan(wb, plan)
    for a3, a4, a5 in itertools.product([1, 2, 3], repeat=3):
        for w in (wb, after):
            for name, v in zip(("A3", "A4", "A5"), (a3, a4, a5)):
                w.set_cell(parse_address(name), Literal(float(v)))
        assert evaluate_cell(after, src) == evaluate_cell(wb, src) == oracles.branch_on_true_example(a3, a4, a5)


def test_visibility_complex():
    wb = load_fixture("complex.cells")
    src = parse_address("A1")
    plan = plan_visibility_transform(wb, src, PlacementSpec(label_column=False))
    assert len(plan.test_cells) == 3 and len(plan.outcome_cells) == 4
    assert count_ifs(plan.result_formula) == 3
    assert plan.table_range is None
    after = apply_plan(wb, plan)
    for bits in itertools.product([True, False], repeat=3):
        for w in (wb, after):
            for name, b in zip(("B1", "B2", "B3"), bits):
                w.set_cell(parse_address(name), Literal(b))
        assert evaluate_cell(after, src) == evaluate_cell(wb, src)


def test_visibility_fig1(fig1):
    plan = plan_visibility_transform(fig1, B5, PlacementSpec())
    assert len(plan.test_cells) == 5 and len(plan.outcome_cells) == 6
    assert count_ifs(plan.result_formula) == 5
    assert close(evaluate_cell(apply_plan(fig1, plan), B5), Fraction(25, 6))


def test_visibility_rejects_complex_formula_in_lookup_only():
    wb = Workbook()
    wb.set_formula(parse_address("A1"), COMPLEX_FORMULA)
    assert plan_visibility_transform(wb, parse_address("A1"), PlacementSpec()).mode == "visibility"


def test_latent_div0(fig1):
    fig1.set_cell(parse_address("B16"), Literal(0.0))
    plan = fig5_plan(fig1)
    after = apply_plan(fig1, plan)
    assert close(evaluate_cell(after, B5), Fraction(25, 6))
    latent = detect_latent_errors(after, plan)
    assert [(str(e.address), e.kind) for e in latent] == [("F12", ErrorKind.DIV0)]


def test_no_latent_on_pristine(fig1):
    plan = fig5_plan(fig1)
    assert detect_latent_errors(apply_plan(fig1, plan), plan) == []


def test_latent_with_states(fig1):
    plan = fig5_plan(fig1)
    after = apply_plan(fig1, plan)
    states = [{parse_address("B16"): 0.0, parse_address("B10"): c} for c in ("Rev", "MH")]
    latent = detect_latent_errors(after, plan, states)
    # Rev selects the failing outcome itself, so only the MH state reports
    assert len(latent) == 1 and dict(latent[0].state)[parse_address("B10")] == "MH"


def test_guard(fig1):
    fig1.set_cell(parse_address("B16"), Literal(0.0))
    plan = plan_lookup_transform(fig1, B5, PlacementSpec(anchor=E12), WrapIfError())
    after = apply_plan(fig1, plan)
    assert detect_latent_errors(after, plan) == []
    assert evaluate_cell(after, parse_address("F12")) == "#LATENT!"
    assert close(evaluate_cell(after, B5), Fraction(25, 6))
    after.set_cell(parse_address("B10"), Literal("Rev"))
    assert evaluate_cell(after, B5) == "#LATENT!"


@settings(max_examples=60, deadline=None)
@given(chains())
def test_cell_count_law(chain):
    tests, outcomes = chain
    wb = Workbook()
    src = parse_address("Z1")
    wb.set_cell(src, Formula(IfChain(tuple(tests), tuple(outcomes)).to_expr()))
    plan = plan_lookup_transform(wb, src, PlacementSpec(), NoGuard())
    n = len(tests)
    assert plan.generated_cell_count == 2 * n + 2
    assert count_ifs(plan.result_formula) == 0
    for (t, _), (o, _) in zip(plan.test_cells, plan.outcome_cells):
        assert t.row == o.row
