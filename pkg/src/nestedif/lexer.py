"""Lexer backend selection.

The compiled extension is used when it was built; otherwise the pure-Python
scanner. Set ``NESTEDIF_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _lexer_py
from ._lexer_py import BANG, COLON, COMMA, IDENT, LPAREN, NUMBER, OP, QSHEET, RPAREN, STRING

tokenize_py = _lexer_py.tokenize

try:
    if os.environ.get("NESTEDIF_PURE_PYTHON"):
        raise ImportError("pure-python backend requested")
    from ._lexer import tokenize as tokenize_ext
except ImportError:
    tokenize_ext = None

if tokenize_ext is not None:
    tokenize = tokenize_ext
    BACKEND = "cython"
else:
    tokenize = tokenize_py
    BACKEND = "python"

__all__ = [
    "BACKEND",
    "tokenize",
    "tokenize_py",
    "tokenize_ext",
    "NUMBER",
    "STRING",
    "IDENT",
    "QSHEET",
    "OP",
    "LPAREN",
    "RPAREN",
    "COMMA",
    "COLON",
    "BANG",
]
