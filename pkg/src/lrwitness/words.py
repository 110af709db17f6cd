"""Words in the free group on ``a, b``.

Flat encoding: ``a``, ``b`` are the generators and ``A``, ``B`` their inverses.
Exponent encoding: ``a^k`` / ``b^k`` for a nonzero signed decimal ``k``, with
optional braces (``a^{-2}``) so the LaTeX form can be pasted verbatim.  The two
forms may be mixed and whitespace is ignored.

A :class:`Word` is just a ``str`` over ``{a, A, b, B}``; nothing here reduces
implicitly.
"""

from __future__ import annotations

import re
from typing import Literal

Word = str

LETTERS = "aAbB"
INVERSE = {"a": "A", "A": "a", "b": "B", "B": "b"}
# search enumeration order a < A < b < B
LETTER_RANK = {ch: i for i, ch in enumerate(LETTERS)}

_TOKEN = re.compile(r"([abAB])(?:\^(?:\{\s*([+-]?\d+)\s*\}|([+-]?\d+)))?")
_WS = re.compile(r"\s+")


class WordParseError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


def parse_word(text: str) -> Word:
    """Parse flat or exponent notation into a flat word (no reduction).

    >>> parse_word("a^2bA^2B")
    'aabAAB'
    """
    out: list[str] = []
    pos = 0
    n = len(text)
    while pos < n:
        ws = _WS.match(text, pos)
        if ws:
            pos = ws.end()
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise WordParseError(f"unexpected character {text[pos]!r}", pos)
        letter, braced, bare = m.groups()
        if "^" in m.group(0):
            k = int(braced if braced is not None else bare)
            if k == 0:
                raise WordParseError("zero exponent", pos)
        else:
            if m.end() < n and text[m.end()] == "^":
                raise WordParseError("malformed exponent", m.end())
            k = 1
        if k < 0:
            letter = INVERSE[letter]
        out.append(letter * abs(k))
        pos = m.end()
    return "".join(out)


def format_word(w: Word, style: Literal["flat", "exponent"] = "flat") -> str:
    """Render ``w``; ``exponent`` style collapses maximal runs of one letter.

    >>> format_word("aaB", "exponent")
    'a^2b^-1'
    """
    if style == "flat":
        return w
    if style != "exponent":
        raise ValueError(f"unknown style {style!r}")
    parts = []
    for m in re.finditer(r"a+|A+|b+|B+", w):
        run = m.group(0)
        gen = run[0].lower()
        k = len(run) if run[0].islower() else -len(run)
        parts.append(gen if k == 1 else f"{gen}^{k}")
    return "".join(parts)


def free_reduce(w: Word) -> Word:
    stack: list[str] = []
    for ch in w:
        if stack and stack[-1] == INVERSE[ch]:
            stack.pop()
        else:
            stack.append(ch)
    return "".join(stack)


def is_reduced(w: Word) -> bool:
    return all(INVERSE[x] != y for x, y in zip(w, w[1:]))


def invert_word(w: Word) -> Word:
    return "".join(INVERSE[ch] for ch in reversed(w))


def shortlex_key(w: Word) -> tuple[int, tuple[int, ...]]:
    """Sort key: length first, then lexicographic with a < A < b < B."""
    return (len(w), tuple(LETTER_RANK[ch] for ch in w))


# the certificate word, one displayed line per constant
CERTIFICATE_WORD_EXPONENT = (
    "a^2ba^{-2}b^{-1}aba^2b^{-1}a^{-1}b^{-1}a^2ba^{-1}ba^2b^{-1}a^{-1}b^{-1}"
    "abab^{-1}aba^{-1}ba^2b^{-1}a^3ba^{-2}b^{-1}",
    "ab^{-1}a^{-2}b^2ab^{-1}a^{-2}ba^{-1}b^{-1}ab^{-1}a^{-2}bab^{-1}a^2ba^{-1}"
    "bab^{-1}aba^{-1}ba^2b^{-1}a^3ba^{-2}b^{-1}",
)
CERTIFICATE_WORD_FLAT = (
    "aabAABabaaBABaabAbaaBABabaBabAbaaBaaabAAB"
    "aBAAbbaBAAbABaBAAbaBaabAbaBabAbaaBaaabAAB"
)


def paper_witness_word() -> Word:
    """The 82-letter word whose image in the Long-Reid group is integral."""
    return CERTIFICATE_WORD_FLAT
