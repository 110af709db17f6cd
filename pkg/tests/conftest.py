from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from lrwitness.exact import ProjectiveMatrix, canonicalize, mul
from lrwitness.words import LETTERS, free_reduce

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def report(number: int, title: str, ok: bool, detail: str = "") -> None:
        mark = "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append(f"[{mark}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))
        print(ACCEPTANCE_LINES[-1])

    return report


# --- shared generators ---------------------------------------------------------

TOY_GENERATORS = (canonicalize([[2, 0], [0, 1]]), canonicalize([[1, 1], [0, 1]]))
S = canonicalize([[0, -1], [1, 0]])
T = canonicalize([[1, 1], [0, 1]])
T_INV = canonicalize([[1, -1], [0, 1]])

small_ints = st.integers(min_value=-40, max_value=40)


def matrices(elements=small_ints) -> st.SearchStrategy[ProjectiveMatrix]:
    return (
        st.tuples(elements, elements, elements, elements)
        .filter(lambda m: m[0] * m[3] != m[1] * m[2])
        .map(lambda m: canonicalize([m[:2], m[2:]]))
    )


@st.composite
def s_arithmetic_matrices(draw) -> ProjectiveMatrix:
    """Elements of PGL_2(Z[1/6]) as canonical integer matrices."""
    left = draw(st.lists(st.sampled_from([S, T, T_INV]), max_size=6))
    right = draw(st.lists(st.sampled_from([S, T, T_INV]), max_size=6))
    i, j = draw(st.integers(0, 3)), draw(st.integers(0, 3))
    m = canonicalize([[2**i * 3**j, 0], [0, 1]])
    for g in left:
        m = mul(g, m)
    for g in right:
        m = mul(m, g)
    return m


words = st.text(alphabet=LETTERS, max_size=30)
reduced_words = words.map(free_reduce)

nonzero_rationals = st.builds(
    Fraction,
    st.integers(min_value=-10**6, max_value=10**6).filter(bool),
    st.integers(min_value=1, max_value=10**6),
)


def random_word(rng: random.Random, max_len: int, min_len: int = 0) -> str:
    return "".join(rng.choice(LETTERS) for _ in range(rng.randint(min_len, max_len)))


def random_sl2z(rng: random.Random, length: int) -> ProjectiveMatrix:
    m = canonicalize([[1, 0], [0, 1]])
    for _ in range(length):
        m = mul(m, rng.choice([S, T, T_INV]))
    return m


def random_s_arithmetic_pair(rng: random.Random) -> tuple[ProjectiveMatrix, ProjectiveMatrix]:
    """Two generators U diag(2^i 3^j, 1) V with U, V random in SL_2(Z)."""
    gens = []
    for _ in range(2):
        i, j = rng.randint(0, 2), rng.randint(0, 2)
        if i == j == 0:
            i = 1
        d = canonicalize([[2**i * 3**j, 0], [0, 1]])
        gens.append(mul(mul(random_sl2z(rng, rng.randint(1, 4)), d), random_sl2z(rng, rng.randint(1, 4))))
    return gens[0], gens[1]
