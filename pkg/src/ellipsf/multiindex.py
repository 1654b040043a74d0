"""Multi-index bookkeeping and the graded-lex order.

Within degree ``l`` multi-indices are listed with the first component
descending (then the second, and so on); degrees are listed in ascending
order.  For ``d = 2, l = 2`` this gives ``(2,0), (1,1), (0,2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial, prod
from typing import Sequence

__all__ = [
    "MultiIndex",
    "GradedBasis",
    "homogeneous",
    "graded",
    "graded_basis",
    "dim_h",
    "dim_g",
    "mabs",
    "mfact",
    "mbinom",
    "mleq",
    "madd",
    "msub",
    "mpow",
]

MultiIndex = tuple


def dim_h(d: int, l: int) -> int:
    """Number of monomials of exact degree ``l`` in ``d`` variables."""
    if l < 0:
        return 0
    return comb(d + l - 1, l)


def dim_g(d: int, l: int) -> int:
    """Number of monomials of degree at most ``l``; zero for ``l < 0``."""
    if l < 0:
        return 0
    return comb(d + l, l)


@lru_cache(maxsize=None)
def homogeneous(d: int, l: int) -> tuple:
    """Degree-``l`` multi-indices in graded-lex order."""
    if d == 1:
        return ((l,),)
    out = []
    for a in range(l, -1, -1):
        for rest in homogeneous(d - 1, l - a):
            out.append((a,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def graded(d: int, L: int) -> tuple:
    """All multi-indices of degree at most ``L`` in graded-lex order."""
    out = []
    for l in range(L + 1):
        out.extend(homogeneous(d, l))
    return tuple(out)


@dataclass(frozen=True)
class GradedBasis:
    """Monomial basis of polynomials of degree at most ``L``."""

    d: int
    L: int
    indices: tuple
    position: dict = field(compare=False, repr=False)

    @property
    def size(self) -> int:
        return len(self.indices)

    def block(self, l: int) -> range:
        """Positions of the degree-``l`` monomials."""
        return range(dim_g(self.d, l - 1), dim_g(self.d, l))

    def degree_of(self, pos: int) -> int:
        return sum(self.indices[pos])


@lru_cache(maxsize=None)
def graded_basis(d: int, L: int) -> GradedBasis:
    idx = graded(d, L)
    return GradedBasis(d, L, idx, {a: i for i, a in enumerate(idx)})


def mabs(a: Sequence[int]) -> int:
    return sum(a)


def mfact(a: Sequence[int]) -> int:
    return prod(factorial(x) for x in a)


def mleq(b: Sequence[int], a: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(b, a))


def mbinom(a: Sequence[int], b: Sequence[int]) -> int:
    """Product of binomials ``C(a_i, b_i)``; zero unless ``b <= a``."""
    if not mleq(b, a):
        return 0
    return prod(comb(x, y) for x, y in zip(a, b))


def madd(a, b) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def msub(a, b) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def mpow(x: Sequence, a: Sequence[int]):
    """``x**a`` for a point ``x`` (exact if ``x`` is exact)."""
    out = 1
    for xi, ai in zip(x, a):
        if ai:
            out = out * xi**ai
    return out
