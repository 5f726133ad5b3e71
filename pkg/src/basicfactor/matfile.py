"""Plain-text matrix files.

A file holds one matrix: a header ``rows cols`` followed by ``rows * cols``
whitespace-separated complex literals in row-major order. Literals look like
``2``, ``-1.5e3``, ``1-2i``, ``0.5i``, ``-i``. Lines starting with ``#`` are
comments.
"""

from __future__ import annotations

import re

import numpy as np

from .errors import BadHeader, BadToken, CountMismatch

_UFLOAT = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_LITERAL = re.compile(
    rf"(?P<re>[+-]?{_UFLOAT})(?P<im>[+-](?:{_UFLOAT})?i)?|(?P<pim>[+-]?(?:{_UFLOAT})?i)"
)


def parse_complex(token: str) -> complex:
    m = _LITERAL.fullmatch(token)
    if m is None:
        raise ValueError(token)
    if m.group("pim") is not None:
        return complex(0.0, _imag_part(m.group("pim")))
    re_part = float(m.group("re"))
    if m.group("im") is None:
        return complex(re_part, 0.0)
    return complex(re_part, _imag_part(m.group("im")))


def _imag_part(text: str) -> float:
    body = text[:-1]
    if body in ("", "+"):
        return 1.0
    if body == "-":
        return -1.0
    return float(body)


def _tokens(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.lstrip().startswith("#"):
            continue
        for m in re.finditer(r"\S+", line):
            yield lineno, m.start() + 1, m.group()


def parse_matrix(text: str) -> np.ndarray:
    """Parse matrix-file text into a complex array.

    Raises BadHeader, BadToken (with line and column) or CountMismatch.
    """
    toks = list(_tokens(text))
    if len(toks) < 2:
        raise BadHeader("missing 'rows cols' header")
    try:
        rows, cols = int(toks[0][2]), int(toks[1][2])
    except ValueError:
        raise BadHeader(f"header must be two positive integers, got {toks[0][2]!r} {toks[1][2]!r}") from None
    if rows < 1 or cols < 1:
        raise BadHeader(f"header must be two positive integers, got {rows} {cols}")
    body = toks[2:]
    if len(body) != rows * cols:
        raise CountMismatch(f"header says {rows}x{cols} = {rows * cols} entries, found {len(body)}")
    values = []
    for line, col, tok in body:
        try:
            values.append(parse_complex(tok))
        except ValueError:
            raise BadToken(line, col, tok) from None
    M = np.array(values, dtype=complex).reshape(rows, cols)
    if not np.all(np.isfinite(M)):
        raise BadToken(body[0][0], body[0][1], "non-finite entry")
    return M


def format_complex(z: complex) -> str:
    re_, im = float(z.real), float(z.imag)
    if im == 0:
        return f"{re_:.17g}"
    sign = "+" if im >= 0 else "-"
    if re_ == 0:
        return f"{im:.17g}i"
    return f"{re_:.17g}{sign}{abs(im):.17g}i"


def format_matrix(M) -> str:
    M = np.asarray(M, dtype=complex)
    lines = [f"{M.shape[0]} {M.shape[1]}"]
    for row in M:
        lines.append(" ".join(format_complex(z) for z in row))
    return "\n".join(lines) + "\n"
