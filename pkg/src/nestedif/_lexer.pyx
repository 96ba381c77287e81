# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled formula lexer; same contract as ``_lexer_py.tokenize``."""

from nestedif.errors import FormulaSyntaxError, UnterminatedString

cdef enum:
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


cdef inline bint is_digit(unsigned char c):
    return 48 <= c <= 57


cdef inline bint is_ident_start(unsigned char c):
    return (65 <= c <= 90) or (97 <= c <= 122) or c == 95 or c == 36 or c == 92 or c >= 128


cdef inline bint is_ident_cont(unsigned char c):
    return is_ident_start(c) or is_digit(c) or c == 46


def tokenize(bytes data):
    cdef const unsigned char[:] buf = data
    cdef Py_ssize_t n = len(data)
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t j, start
    cdef unsigned char c, q
    cdef int kind
    out = []
    while i < n:
        c = buf[i]
        if c == 32 or c == 9 or c == 13 or c == 10:
            i += 1
        elif is_digit(c) or (c == 46 and i + 1 < n and is_digit(buf[i + 1])):
            start = i
            while i < n and is_digit(buf[i]):
                i += 1
            if i < n and buf[i] == 46:
                i += 1
                while i < n and is_digit(buf[i]):
                    i += 1
            if i < n and (buf[i] == 101 or buf[i] == 69):
                j = i + 1
                if j < n and (buf[j] == 43 or buf[j] == 45):
                    j += 1
                if j < n and is_digit(buf[j]):
                    i = j
                    while i < n and is_digit(buf[i]):
                        i += 1
            out.append((NUMBER, start, i))
        elif c == 34 or c == 39:
            start = i
            q = c
            kind = STRING if c == 34 else QSHEET
            i += 1
            while True:
                if i >= n:
                    what = "string" if kind == STRING else "quoted sheet name"
                    raise UnterminatedString(f"unterminated {what}", start, "closing quote")
                if buf[i] == q:
                    if i + 1 < n and buf[i + 1] == q:
                        i += 2
                        continue
                    i += 1
                    break
                i += 1
            out.append((kind, start, i))
        elif is_ident_start(c):
            start = i
            i += 1
            while i < n and is_ident_cont(buf[i]):
                i += 1
            out.append((IDENT, start, i))
        elif c == 60:  # <
            if i + 1 < n and (buf[i + 1] == 61 or buf[i + 1] == 62):
                out.append((OP, i, i + 2))
                i += 2
            else:
                out.append((OP, i, i + 1))
                i += 1
        elif c == 62:  # >
            if i + 1 < n and buf[i + 1] == 61:
                out.append((OP, i, i + 2))
                i += 2
            else:
                out.append((OP, i, i + 1))
                i += 1
        elif c == 61 or c == 43 or c == 45 or c == 42 or c == 47 or c == 94 or c == 38 or c == 37:
            out.append((OP, i, i + 1))
            i += 1
        elif c == 40:
            out.append((LPAREN, i, i + 1))
            i += 1
        elif c == 41:
            out.append((RPAREN, i, i + 1))
            i += 1
        elif c == 44:
            out.append((COMMA, i, i + 1))
            i += 1
        elif c == 58:
            out.append((COLON, i, i + 1))
            i += 1
        elif c == 33:
            out.append((BANG, i, i + 1))
            i += 1
        else:
            raise FormulaSyntaxError(f"unexpected character {chr(c)!r}", i, "a token")
    return out
