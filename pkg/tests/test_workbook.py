import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIG1_FORMULA
from nestedif.errors import BadAddress, CellListSyntaxError, DuplicateCell, DuplicateName
from nestedif.values import EMPTY
from nestedif.workbook import (
    CellAddress,
    Formula,
    Literal,
    RangeAddress,
    Workbook,
    format_address,
    format_literal,
    load_cell_list,
    parse_address,
    parse_literal,
    save_cell_list,
)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("B10", CellAddress("Sheet1", 2, 10)),
        ("AA1", CellAddress("Sheet1", 27, 1)),
        ("Model!$E$12", CellAddress("Model", 5, 12)),
        ("'My Data'!C3", CellAddress("My Data", 3, 3)),
    ],
)
def test_parse_address(text, expected):
    assert parse_address(text) == expected


@pytest.mark.parametrize("text", ["", "1A", "A0", "XFE1", "Sheet!", "A1:B2", "'x!A1"])
def test_bad_address(text):
    with pytest.raises(BadAddress):
        parse_address(text)


def test_format_address_round_trip():
    for addr in [CellAddress("Sheet1", 2, 10), CellAddress("Model", 28, 3), CellAddress("it's", 1, 1)]:
        assert parse_address(format_address(addr)) == addr


def test_fig1_lines(fig1):
    assert fig1.get_cell(parse_address("B10")) == Literal("MH")
    assert fig1.get_cell(parse_address("B14")) == Literal(5.0)
    b5 = fig1.get_cell(parse_address("B5"))
    assert isinstance(b5, Formula)
    assert b5.expr == Formula.parse(FIG1_FORMULA).expr


def test_unset_cell_is_empty():
    wb = Workbook()
    assert wb.get_cell(parse_address("Z99")).value is EMPTY
    assert wb.is_empty(parse_address("Z99"))


def test_duplicate_cell_reports_line():
    with pytest.raises(DuplicateCell) as info:
        load_cell_list("A1 := 1\n# comment\nA1 := 2\n")
    assert info.value.line == 3


def test_duplicate_name():
    with pytest.raises(DuplicateName):
        load_cell_list("name Rate := B1\nname rate := B2\n")


@pytest.mark.parametrize("doc", ["A1 = 1\n", "A1 := =IF(\n", "name 1x := A1\n", "ZZZZ1 := 3\n"])
def test_malformed_lines(doc):
    with pytest.raises(CellListSyntaxError) as info:
        load_cell_list(doc)
    assert info.value.line == 1


def test_names_resolve():
    wb = load_cell_list("B1 := 4\nname Rate := B1\nname Table := E12:F17\nA1 := =Rate*2\n")
    assert wb.resolve_name("RATE") == parse_address("B1")
    assert isinstance(wb.resolve_name("table"), RangeAddress)


def test_literal_typing():
    assert parse_literal("5") == 5.0
    assert parse_literal("-2.5e1") == -25.0
    assert parse_literal("TRUE") is True
    assert parse_literal("MH") == "MH"
    assert parse_literal("") is EMPTY
    assert parse_literal('"007"') == "007"


def test_fixture_round_trip(fig1):
    doc = save_cell_list(fig1)
    assert load_cell_list(doc) == fig1
    assert save_cell_list(load_cell_list(doc)) == doc


literal_values = st.one_of(
    st.floats(allow_nan=False, allow_infinity=False),
    st.booleans(),
    st.text(st.characters(blacklist_categories=("Cs", "Cc", "Zl", "Zp")), max_size=10),
)


@settings(max_examples=200)
@given(literal_values)
def test_literal_round_trip(value):
    back = parse_literal(format_literal(value))
    assert back == value and type(back) is type(value)


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(1, 40), st.integers(1, 40)), literal_values.filter(lambda v: v != ""), max_size=15))
def test_document_round_trip(cells):
    wb = Workbook()
    for (c, r), v in cells.items():
        wb.set_cell(CellAddress("Sheet1", c, r), Literal(v))
    assert load_cell_list(save_cell_list(wb)) == wb
