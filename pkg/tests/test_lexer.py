import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nestedif import lexer
from nestedif.errors import FormulaSyntaxError, UnterminatedString
from nestedif.lexer import COMMA, IDENT, LPAREN, NUMBER, OP, QSHEET, RPAREN, STRING, tokenize_py

BACKENDS = [tokenize_py] + ([lexer.tokenize_ext] if lexer.tokenize_ext is not None else [])


def kinds(tokens):
    return [t[0] for t in tokens]


@pytest.mark.parametrize("tokenize", BACKENDS)
def test_basic_kinds(tokenize):
    toks = tokenize(b'IF(A1>=2, "x""y", 3.5e2)')
    assert kinds(toks) == [IDENT, LPAREN, IDENT, OP, NUMBER, COMMA, STRING, COMMA, NUMBER, RPAREN]
    assert toks[3][1:] == (5, 7)


@pytest.mark.parametrize("tokenize", BACKENDS)
def test_quoted_sheet(tokenize):
    toks = tokenize(b"'My ''Data'''!A1")
    assert toks[0] == (QSHEET, 0, 13)


@pytest.mark.parametrize("tokenize", BACKENDS)
def test_unterminated_string(tokenize):
    with pytest.raises(UnterminatedString) as info:
        tokenize(b'IF(A1="x, 1, 2)')
    assert info.value.offset == 6


@pytest.mark.parametrize("tokenize", BACKENDS)
def test_bad_character(tokenize):
    with pytest.raises(FormulaSyntaxError):
        tokenize(b"A1 # 2")


def test_backend_selected():
    assert lexer.BACKEND in ("cython", "python")


def _outcome(fn, data):
    try:
        return ("ok", fn(data))
    except FormulaSyntaxError as exc:
        return (type(exc).__name__, exc.offset)


@pytest.mark.skipif(lexer.tokenize_ext is None, reason="compiled lexer not built")
@settings(max_examples=300)
@given(st.text(alphabet='AB1$:!,()"\' .+-*/^&=<>%e_#xé', max_size=30))
def test_backends_agree(text):
    data = text.encode("utf-8")
    assert _outcome(lexer.tokenize_ext, data) == _outcome(tokenize_py, data)


def test_forced_fallback():
    env = dict(os.environ, NESTEDIF_PURE_PYTHON="1")
    code = "from nestedif import lexer, parse_formula; print(lexer.BACKEND, parse_formula('=1+2').op)"
    proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert proc.stdout.split() == ["python", "+"]
