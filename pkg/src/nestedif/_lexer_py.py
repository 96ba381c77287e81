"""Pure-Python formula lexer.

Reference implementation of the byte-level scanner; ``_lexer.pyx`` is a
compiled twin with the same contract. Token kinds are small ints so both
backends can share them without importing each other.
"""

from __future__ import annotations

from .errors import FormulaSyntaxError, UnterminatedString

NUMBER = 1
STRING = 2
IDENT = 3
QSHEET = 4
OP = 5
LPAREN = 6
RPAREN = 7
COMMA = 8
COLON = 9
BANG = 10

_SPACE = frozenset(b" \t\r\n")
_DIGITS = frozenset(b"0123456789")
_IDENT_START = frozenset(b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_$\\") | frozenset(range(0x80, 0x100))
_IDENT_CONT = _IDENT_START | _DIGITS | frozenset(b".")
_SINGLE = {
    ord("("): LPAREN,
    ord(")"): RPAREN,
    ord(","): COMMA,
    ord(":"): COLON,
    ord("!"): BANG,
}
_OPS = frozenset(b"=+-*/^&%")


def tokenize(data: bytes) -> list[tuple[int, int, int]]:
    """Split UTF-8 formula bytes into ``(kind, start, end)`` triples.

    Whitespace is dropped. String and quoted-sheet tokens include their
    delimiters; ``""`` / ``''`` inside them are escapes, not terminators.
    """
    out = []
    i = 0
    n = len(data)
    while i < n:
        c = data[i]
        if c in _SPACE:
            i += 1
        elif c in _DIGITS or (c == 0x2E and i + 1 < n and data[i + 1] in _DIGITS):
            start = i
            while i < n and data[i] in _DIGITS:
                i += 1
            if i < n and data[i] == 0x2E:
                i += 1
                while i < n and data[i] in _DIGITS:
                    i += 1
            if i < n and data[i] in b"eE":
                j = i + 1
                if j < n and data[j] in b"+-":
                    j += 1
                if j < n and data[j] in _DIGITS:
                    i = j
                    while i < n and data[i] in _DIGITS:
                        i += 1
            out.append((NUMBER, start, i))
        elif c == 0x22 or c == 0x27:
            start = i
            kind = STRING if c == 0x22 else QSHEET
            i += 1
            while True:
                if i >= n:
                    what = "string" if kind == STRING else "quoted sheet name"
                    raise UnterminatedString(f"unterminated {what}", start, "closing quote")
                if data[i] == c:
                    if i + 1 < n and data[i + 1] == c:
                        i += 2
                        continue
                    i += 1
                    break
                i += 1
            out.append((kind, start, i))
        elif c in _IDENT_START:
            start = i
            i += 1
            while i < n and data[i] in _IDENT_CONT:
                i += 1
            out.append((IDENT, start, i))
        elif c == 0x3C:  # <
            if i + 1 < n and data[i + 1] in b"=>":
                out.append((OP, i, i + 2))
                i += 2
            else:
                out.append((OP, i, i + 1))
                i += 1
        elif c == 0x3E:  # >
            if i + 1 < n and data[i + 1] == 0x3D:
                out.append((OP, i, i + 2))
                i += 2
            else:
                out.append((OP, i, i + 1))
                i += 1
        elif c in _OPS:
            out.append((OP, i, i + 1))
            i += 1
        elif c in _SINGLE:
            out.append((_SINGLE[c], i, i + 1))
            i += 1
        else:
            raise FormulaSyntaxError(f"unexpected character {chr(c)!r}", i, "a token")
    return out
