"""Shared cached fixtures and small oracles for the test suite."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from ellipsf import gallery as g
from ellipsf.masks import TrigPoly, elliptic_mask
from ellipsf.polyops import MultiPoly, PolynomialSpace
from ellipsf.ratcore import I
from ellipsf.scalingfn import NumericJets, SymbolicJets
from ellipsf.strangfix import shift_invariant_space

X = MultiPoly.var(2, 0)
Y = MultiPoly.var(2, 1)
ONE = MultiPoly.const(2, 1)
W_LAPLACE = X * X + Y * Y

BUILDERS = {
    "quincunx": lambda: elliptic_mask(g.QUINCUNX),
    "second": lambda: elliptic_mask(g.SECOND),
    "diag": lambda: elliptic_mask(g.DIAG2),
    "higher6": lambda: g.higher_quincunx(6),
    "higher8": lambda: g.higher_quincunx(8),
    "nonstat_quincunx": g.nonstat_quincunx,
    "nonstat_diag": g.nonstat_diag,
    "sum_of_powers": g.sum_of_powers_quincunx,
    "quincunx_m2": lambda: elliptic_mask(g.QUINCUNX, order=2),
}


@lru_cache(maxsize=None)
def spec(name):
    return BUILDERS[name]()


@lru_cache(maxsize=None)
def exact_result(name):
    s = spec(name)
    return shift_invariant_space(SymbolicJets(s), s.default_lmax())


@lru_cache(maxsize=None)
def numeric_result(name):
    s = spec(name)
    return shift_invariant_space(NumericJets(s, 30), s.default_lmax(), N=2, tol=1e-9)


def space(*polys) -> PolynomialSpace:
    return PolynomialSpace(2, tuple(polys))


def cos(i, m=1):
    return TrigPoly.cos(2, i, m)


def sin(i, m=1):
    return TrigPoly.sin(2, i, m)


def const(c):
    return TrigPoly.const(2, c)


def minor_rank(rows) -> int:
    """Largest k with a non-vanishing k x k minor (exact, brute force)."""
    m, n = len(rows), len(rows[0]) if rows else 0
    for k in range(min(m, n), 0, -1):
        for r in combinations(range(m), k):
            for c in combinations(range(n), k):
                if _det([[rows[i][j] for j in c] for i in r]) != 0:
                    return k
    return 0


def _det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    return sum(((-1) ** j) * M[0][j] * _det([row[:j] + row[j + 1:] for row in M[1:]]) for j in range(n))


QUINCUNX_SPACE_L3 = space(ONE, X, Y, X * X - Y * Y, X * Y, X**3 - 3 * X * Y * Y, Y**3 - 3 * X * X * Y)
SECOND_SPACE = space(
    ONE, X, Y, X * X - 4 * X * Y, Y * Y - 2 * X * Y,
    X**3 + 6 * X * X * Y - 12 * X * Y * Y, Y**3 - 3 * X * X * Y + 3 * X * Y * Y,
)
NONSTAT_QUINCUNX_SPACE = space(ONE, Y, X + Y * Y)
NONSTAT_DIAG_SPACE = space(
    ONE, X, Y, X * X - Y * Y, X * Y,
    3 * X * X - X**3 + 3 * X * Y * Y, 3 * Y * Y - Y**3 + 3 * X * X * Y,
)
NONSTAT_DIAG_SYMBOL = W_LAPLACE + MultiPoly(2, {(3, 0): I, (0, 3): I})
HALF = Fraction(1, 2)
