"""Hypothesis strategies for formula ASTs and nested-IF chains."""

from hypothesis import strategies as st

from nestedif.nodes import BinaryOp, BoolLit, CellRef, FuncCall, NameRef, NumberLit, Paren, RangeRef, TextLit, UnaryOp

SHEETS = st.sampled_from([None, None, None, "Sheet2", "Model", "My Data", "it's"])

numbers = st.one_of(
    st.integers(min_value=0, max_value=10**6).map(float),
    st.floats(min_value=0, max_value=1e12, allow_nan=False, allow_infinity=False),
).map(NumberLit)
texts = st.text(st.characters(blacklist_categories=("Cs", "Cc")), max_size=8).map(TextLit)
bools = st.booleans().map(BoolLit)


@st.composite
def cell_refs(draw, sheet=None):
    return CellRef(
        column=draw(st.integers(1, 16384)),
        row=draw(st.integers(1, 1048576)),
        column_absolute=draw(st.booleans()),
        row_absolute=draw(st.booleans()),
        sheet=draw(SHEETS) if sheet is None else sheet,
    )


@st.composite
def range_refs(draw):
    sheet = draw(SHEETS)
    start = draw(cell_refs(sheet=sheet or ""))
    end = draw(cell_refs(sheet=""))
    start = CellRef(start.column, start.row, start.column_absolute, start.row_absolute, sheet)
    end = CellRef(end.column, end.row, end.column_absolute, end.row_absolute, None)
    return RangeRef(start, end)


names = st.sampled_from(["Rate", "Test1", "Value_2", "tax.rate", "_x"]).map(NameRef)
leaves = st.one_of(numbers, texts, bools, cell_refs(), names)


def _extend(children):
    return st.one_of(
        st.builds(BinaryOp, st.sampled_from(["=", "<>", "<", "<=", ">", ">=", "&", "+", "-", "*", "/", "^"]), children, children),
        st.builds(UnaryOp, st.sampled_from(["-", "+", "%"]), children),
        st.builds(Paren, children),
        st.builds(
            FuncCall,
            st.sampled_from(["IF", "SUM", "AND", "OR", "NOT", "IFERROR", "VLOOKUP", "FOO"]),
            st.lists(st.one_of(children, range_refs()), min_size=0, max_size=3).map(tuple),
        ),
    )


formulas = st.recursive(leaves, _extend, max_leaves=12)


@st.composite
def chains(draw, min_tests=1, max_tests=10):
    """A branch-on-false chain over comparison tests on column A and numeric outcomes."""
    n = draw(st.integers(min_tests, max_tests))
    tests = [
        BinaryOp(draw(st.sampled_from(["=", "<>", "<", ">", "<=", ">="])), CellRef(1, i + 1), NumberLit(float(draw(st.integers(0, 3)))))
        for i in range(n)
    ]
    outcomes = [NumberLit(float(draw(st.integers(-50, 50)))) for _ in range(n + 1)]
    return tests, outcomes
