from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import matrices, nonzero_rationals
from lrwitness.exact import (
    IDENTITY,
    ProjectiveMatrix,
    SingularMatrixError,
    ValuationError,
    canonicalize,
    det,
    inverse,
    mul,
    power,
    trace,
    valuation,
)

PRIMES = [2, 3, 5, 7, 11, 13]


@pytest.mark.parametrize(
    "raw, expected",
    [
        ([[2, 0], [0, 2]], (1, 0, 0, 1)),
        ([[Fraction(9, 3), 0], [0, Fraction(1, 3)]], (9, 0, 0, 1)),
        ([[-1, 0], [0, 1]], (1, 0, 0, -1)),
        ([[0, -4], [6, 2]], (0, 2, -3, -1)),
    ],
)
def test_canonicalize_examples(raw, expected):
    assert canonicalize(raw).entries == expected


def test_canonicalize_singular():
    with pytest.raises(SingularMatrixError):
        canonicalize([[1, 2], [2, 4]])


def test_mul_and_inverse_examples():
    a = canonicalize([[9, 0], [0, 1]])
    b = canonicalize([[82, 2], [9, 1]])
    assert mul(a, b).entries == (738, 18, 9, 1)
    assert inverse(IDENTITY) == IDENTITY
    assert inverse(a).entries == (1, 0, 0, 9)
    assert inverse(b).entries == (1, -2, -9, 82)
    assert mul(b, inverse(b)) == IDENTITY


def test_det_trace_examples():
    assert det(canonicalize([[82, 2], [9, 1]])) == 64
    assert trace(canonicalize([[0, -1], [1, 0]])) == 0
    assert det(IDENTITY) == 1


@pytest.mark.parametrize("n, p, e", [(64, 2, 6), (9, 3, 2), (9, 2, 0), (-48, 2, 4), (3**40 * 7, 3, 40)])
def test_valuation_examples(n, p, e):
    assert valuation(n, p) == e


def test_valuation_of_zero():
    with pytest.raises(ValuationError):
        valuation(0, 5)


@given(matrices())
def test_canonical_form_invariants(m):
    from math import gcd

    assert gcd(*m.entries) == 1
    assert next(x for x in m.entries if x) > 0
    assert m.det != 0
    assert canonicalize(m.rows) == m


@given(matrices(), nonzero_rationals)
def test_scalar_invariance(m, lam):
    scaled = [[lam * x for x in row] for row in m.rows]
    assert canonicalize(scaled) == m


@given(matrices(), matrices(), matrices())
def test_group_laws(x, y, z):
    assert mul(mul(x, y), z) == mul(x, mul(y, z))
    assert mul(IDENTITY, x) == x == mul(x, IDENTITY)
    assert inverse(inverse(x)) == x
    assert mul(x, inverse(x)) == IDENTITY


@given(matrices(), matrices())
def test_mul_matches_fraction_product(x, y):
    # oracle: full rational product then canonicalize
    rx = [[Fraction(v) for v in row] for row in x.rows]
    ry = [[Fraction(v) for v in row] for row in y.rows]
    prod = [[sum(rx[i][k] * ry[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    assert mul(x, y) == canonicalize(prod)


@given(matrices(), matrices())
def test_det_valuation_parity(x, y):
    d = det(mul(x, y))
    for p in PRIMES:
        assert valuation(d, p) % 2 == (valuation(det(x), p) + valuation(det(y), p)) % 2


@given(st.integers(1, 10**12), st.integers(1, 10**12), st.sampled_from(PRIMES))
def test_valuation_additive(a, b, p):
    assert valuation(a * b, p) == valuation(a, p) + valuation(b, p)
    assert a % p ** valuation(a, p) == 0 and a % p ** (valuation(a, p) + 1) != 0


@given(matrices(), st.integers(-6, 6))
def test_power_matches_repeated_mul(m, n):
    expected = IDENTITY
    step = m if n >= 0 else inverse(m)
    for _ in range(abs(n)):
        expected = mul(expected, step)
    assert power(m, n) == expected


def test_matrix_is_hashable_and_immutable():
    m = ProjectiveMatrix(1, 0, 0, 1)
    assert {m: 1}[IDENTITY] == 1
    with pytest.raises(AttributeError):
        m.m11 = 2
