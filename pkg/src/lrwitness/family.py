"""The one-parameter family of representations of <a, b | [a, b]^2 = 1>.

For a rational parameter t the generators are

    a -> [[t, 0], [0, 1]]        b -> [[1 + t^2, 2], [t, 1]]

taken projectively.  t = 9 gives the Long-Reid group inside PGL_2(Z[1/6]).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache, cached_property
from math import isqrt
from typing import NamedTuple

from .exact import IDENTITY, ProjectiveMatrix, Rational, canonicalize, inverse, mul
from .words import Word

LONG_REID_T = 9
EXCLUDED_T = (0, 1, -1)


class DegenerateParameterError(ValueError):
    pass


class RelatorCheck(NamedTuple):
    commutator: ProjectiveMatrix
    trace_zero: bool
    square_trivial: bool


@dataclass(frozen=True)
class RepFamily:
    t: Fraction | None  # None for an arbitrary generator pair
    gen_a: ProjectiveMatrix
    gen_b: ProjectiveMatrix

    @cached_property
    def images(self) -> dict[str, ProjectiveMatrix]:
        """Letter -> matrix, including inverses."""
        return {
            "a": self.gen_a,
            "A": inverse(self.gen_a),
            "b": self.gen_b,
            "B": inverse(self.gen_b),
        }


def make_family(t: Rational | str) -> RepFamily:
    t = Fraction(t)
    if t in EXCLUDED_T:
        raise DegenerateParameterError(f"parameter t={t} is excluded (t must avoid 0, 1, -1)")
    gen_a = canonicalize([[t, 0], [0, 1]])
    gen_b = canonicalize([[1 + t * t, 2], [t, 1]])
    return RepFamily(t, gen_a, gen_b)


def from_generators(gen_a: ProjectiveMatrix, gen_b: ProjectiveMatrix) -> RepFamily:
    """Wrap an arbitrary generator pair; no relator is implied."""
    return RepFamily(None, gen_a, gen_b)


def constraint_holds(t: Rational, b: ProjectiveMatrix | list[list[Rational]]) -> bool:
    """Whether ``2 b11 b22 == (t + 1/t) b12 b21`` for a second generator ``b``."""
    t = Fraction(t)
    if isinstance(b, ProjectiveMatrix):
        b = b.rows
    (b11, b12), (b21, b22) = b
    return 2 * Fraction(b11) * b22 == (t + 1 / t) * Fraction(b12) * b21


def check_constraint(fam: RepFamily) -> bool:
    if fam.t is None:
        raise ValueError("family has no parameter")
    # homogeneous of degree 2 in b, so the canonical representative is fine
    return constraint_holds(fam.t, fam.gen_b)


def check_relator(fam: RepFamily) -> RelatorCheck:
    a, b = fam.gen_a, fam.gen_b
    c = mul(mul(a, b), mul(inverse(a), inverse(b)))
    return RelatorCheck(c, c.trace == 0, mul(c, c) == IDENTITY)


@cache
def long_reid_family() -> RepFamily:
    return make_family(LONG_REID_T)


def long_reid_generators() -> tuple[ProjectiveMatrix, ProjectiveMatrix]:
    fam = long_reid_family()
    return fam.gen_a, fam.gen_b


def unimodular_forms(fam: RepFamily) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """Scale each generator to determinant 1 when the square root is rational.

    For t = 9 this recovers (1/3)[[9,0],[0,1]] and (1/8)[[82,2],[9,1]].
    """
    out = []
    for g in (fam.gen_a, fam.gen_b):
        root = _rational_sqrt(Fraction(g.det))
        if root is None:
            raise ValueError(f"determinant {g.det} is not a rational square")
        out.append([[Fraction(x, 1) / root for x in row] for row in g.rows])
    return out[0], out[1]


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q <= 0:
        return None
    n, d = isqrt(q.numerator), isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def evaluate_word(w: Word, fam: RepFamily | None = None) -> ProjectiveMatrix:
    """Left-to-right product of generator images; defaults to t = 9."""
    images = (fam or long_reid_family()).images
    m = IDENTITY
    for ch in w:
        m = mul(m, images[ch])
    return m

