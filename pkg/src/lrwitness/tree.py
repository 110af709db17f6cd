"""Bruhat-Tits trees of PGL_2(Q_p).

Vertices are homothety classes of Z_p-lattices in Q_p^2.  A matrix g moves the
base vertex L0 = Z_p^2 to the class of its column span g.L0.  After removing the
p-part of the content, g.L0 sits in L0 with cyclic quotient of order p^n, where
n is the tree distance to L0, and g.L0 / p^n L0 is generated by any column of g
that is primitive at p.  Writing that column as (x, y):

    y a unit mod p   ->  key (n, 0, x / y mod p^n)
    otherwise        ->  key (n, 1, y / x mod p^n)    (residue divisible by p)

so the sphere of radius n >= 1 carries p^n + p^(n-1) keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from .exact import ProjectiveMatrix, canonicalize, is_smooth, valuation

DEFAULT_PRIMES = (2, 3)


class DomainError(ValueError):
    """Raised when a determinant has prime factors outside the allowed set."""


class VertexKey(NamedTuple):
    p: int
    n: int
    branch: int
    residue: int

    def serialize(self) -> tuple[int, int, int, str]:
        return (self.p, self.n, self.branch, str(self.residue))

    @classmethod
    def deserialize(cls, data: Sequence) -> VertexKey:
        p, n, branch, residue = data
        key = cls(int(p), int(n), int(branch), int(residue))
        if not is_valid_key(key):
            raise ValueError(f"invalid vertex key {tuple(data)!r}")
        return key


@dataclass(frozen=True)
class PrimeContext:
    p: int

    def __post_init__(self) -> None:
        if self.p < 2 or any(self.p % q == 0 for q in range(2, int(self.p**0.5) + 1)):
            raise ValueError(f"{self.p} is not prime")

    @property
    def degree(self) -> int:
        return self.p + 1


def _prime(ctx: PrimeContext | int) -> int:
    return ctx.p if isinstance(ctx, PrimeContext) else ctx


def _min_entry_valuation(g: ProjectiveMatrix, p: int) -> int:
    return min(valuation(x, p) for x in g.entries if x)


def displacement(g: ProjectiveMatrix, ctx: PrimeContext | int) -> int:
    """Distance in the p-tree from the base vertex to its image under ``g``."""
    p = _prime(ctx)
    return valuation(g.det, p) - 2 * _min_entry_valuation(g, p)


def vertex_key(g: ProjectiveMatrix, ctx: PrimeContext | int) -> VertexKey:
    p = _prime(ctx)
    e = _min_entry_valuation(g, p)
    n = valuation(g.det, p) - 2 * e
    if n == 0:
        return VertexKey(p, 0, 0, 0)
    q = p**n
    scale = p**e
    m11, m12, m21, m22 = (x // scale for x in g.entries)
    # pick a column with an entry that is a unit at p
    if m11 % p or m21 % p:
        x, y = m11, m21
    else:
        x, y = m12, m22
    if y % p:
        return VertexKey(p, n, 0, x * pow(y, -1, q) % q)
    return VertexKey(p, n, 1, y * pow(x, -1, q) % q)


def is_valid_key(key: VertexKey) -> bool:
    p, n, branch, residue = key
    if n < 0 or branch not in (0, 1):
        return False
    if n == 0:
        return branch == 0 and residue == 0
    if not 0 <= residue < p**n:
        return False
    return branch == 0 or residue % p == 0


def sphere_keys(p: int, n: int) -> Iterator[VertexKey]:
    """All valid keys at distance ``n`` from the base vertex."""
    if n == 0:
        yield VertexKey(p, 0, 0, 0)
        return
    q = p**n
    for r in range(q):
        yield VertexKey(p, n, 0, r)
    for r in range(0, q, p):
        yield VertexKey(p, n, 1, r)


def key_representative(key: VertexKey) -> ProjectiveMatrix:
    """A matrix moving the base vertex to ``key`` (inverse of :func:`vertex_key`)."""
    p, n, branch, r = key
    if branch == 0:
        return canonicalize([[p**n, r], [0, 1]])
    return canonicalize([[1, 0], [r, p**n]])


def _check_domain(g: ProjectiveMatrix, primes: Sequence[int]) -> None:
    if not is_smooth(g.det, primes):
        raise DomainError(
            f"det {g.det} has a prime factor outside {tuple(primes)}; "
            "element is not in the S-arithmetic group"
        )


def is_vertex_stabilizer(g: ProjectiveMatrix, primes: Sequence[int] = DEFAULT_PRIMES) -> bool:
    """Whether ``g`` fixes the base vertex in every tree, i.e. lies in PGL_2(Z)."""
    _check_domain(g, primes)
    return abs(g.det) == 1


def vertex_pair(
    g: ProjectiveMatrix, primes: Sequence[int] = DEFAULT_PRIMES
) -> tuple[VertexKey, ...]:
    """Image of the base vertex in the product of trees (one key per prime)."""
    _check_domain(g, primes)
    return tuple(vertex_key(g, p) for p in primes)


def base_pair(primes: Sequence[int] = DEFAULT_PRIMES) -> tuple[VertexKey, ...]:
    return tuple(VertexKey(p, 0, 0, 0) for p in primes)
