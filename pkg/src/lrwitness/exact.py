"""Exact projective 2x2 matrices over the rationals.

A projective class is stored as its unique primitive integer representative whose
first nonzero entry (in the order m11, m12, m21, m22) is positive.  Equality of
classes is then plain tuple equality, which is what the search uses for hashing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence, Union

Rational = Union[int, Fraction]


class SingularMatrixError(ValueError):
    """Raised when a matrix with zero determinant is given a projective class."""


class ValuationError(ValueError):
    """Raised for the valuation of zero."""


@dataclass(frozen=True, slots=True)
class ProjectiveMatrix:
    """Canonical primitive integer representative of a class in PGL_2(Q).

    Construct through :func:`canonicalize` (or :meth:`from_rows`); the raw
    constructor trusts its arguments.
    """

    m11: int
    m12: int
    m21: int
    m22: int

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Rational]]) -> ProjectiveMatrix:
        return canonicalize(rows)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.m11, self.m12, self.m21, self.m22)

    @property
    def rows(self) -> list[list[int]]:
        return [[self.m11, self.m12], [self.m21, self.m22]]

    @property
    def det(self) -> int:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def trace(self) -> int:
        return self.m11 + self.m22

    def is_identity(self) -> bool:
        return self.entries == (1, 0, 0, 1)

    def __matmul__(self, other: ProjectiveMatrix) -> ProjectiveMatrix:
        return mul(self, other)

    def __invert__(self) -> ProjectiveMatrix:
        return inverse(self)

    def __str__(self) -> str:
        return f"[[{self.m11}, {self.m12}], [{self.m21}, {self.m22}]]"


IDENTITY = ProjectiveMatrix(1, 0, 0, 1)


def _normalize_ints(m11: int, m12: int, m21: int, m22: int) -> ProjectiveMatrix:
    if m11 * m22 - m12 * m21 == 0:
        raise SingularMatrixError(f"singular matrix [[{m11}, {m12}], [{m21}, {m22}]]")
    g = gcd(gcd(m11, m12), gcd(m21, m22))
    lead = m11 or m12 or m21
    if lead < 0:
        g = -g
    if g != 1:
        m11, m12, m21, m22 = m11 // g, m12 // g, m21 // g, m22 // g
    return ProjectiveMatrix(m11, m12, m21, m22)


def canonicalize(raw: Sequence[Sequence[Rational]]) -> ProjectiveMatrix:
    """Return the primitive, sign-normalized integer representative of ``raw``.

    ``raw`` is a 2x2 nested sequence of ints or Fractions.

    >>> canonicalize([[2, 0], [0, 2]])
    ProjectiveMatrix(m11=1, m12=0, m21=0, m22=1)
    """
    (a, b), (c, d) = raw
    vals = [Fraction(x) for x in (a, b, c, d)]
    den = lcm(*(v.denominator for v in vals))
    ints = [int(v * den) for v in vals]
    return _normalize_ints(*ints)


def mul(x: ProjectiveMatrix, y: ProjectiveMatrix) -> ProjectiveMatrix:
    return _normalize_ints(
        x.m11 * y.m11 + x.m12 * y.m21,
        x.m11 * y.m12 + x.m12 * y.m22,
        x.m21 * y.m11 + x.m22 * y.m21,
        x.m21 * y.m12 + x.m22 * y.m22,
    )


def inverse(x: ProjectiveMatrix) -> ProjectiveMatrix:
    # adjugate is projectively the inverse and stays integral
    return _normalize_ints(x.m22, -x.m12, -x.m21, x.m11)


def power(x: ProjectiveMatrix, n: int) -> ProjectiveMatrix:
    """Projective ``x**n`` by repeated squaring; negative ``n`` uses the inverse."""
    if n < 0:
        x, n = inverse(x), -n
    result = IDENTITY
    while n:
        if n & 1:
            result = mul(result, x)
        x = mul(x, x)
        n >>= 1
    return result


def det(x: ProjectiveMatrix) -> int:
    return x.det


def trace(x: ProjectiveMatrix) -> int:
    return x.trace


def valuation(n: int, p: int) -> int:
    """Exponent of the prime ``p`` in the nonzero integer ``n``."""
    if n == 0:
        raise ValuationError("valuation of 0 is undefined")
    n = abs(n)
    if p == 2:
        return (n & -n).bit_length() - 1
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def is_smooth(n: int, primes: Sequence[int]) -> bool:
    """True if the nonzero integer ``n`` has no prime factor outside ``primes``."""
    n = abs(n)
    if n == 0:
        return False
    for p in primes:
        while n % p == 0:
            n //= p
    return n == 1
