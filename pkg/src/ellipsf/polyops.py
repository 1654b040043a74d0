"""Exact multivariate polynomials and the differential-operator matrices.

A polynomial ``S`` read as a Fourier symbol acts on polynomials through
``S(-iD)``.  Its matrix on coefficient vectors in the graded basis is
``D_L S(0)`` with entries ``(-i)^|g| C(a, b) g! s_g`` (row ``b``, column
``a``, ``g = a - b``).  The Taylor-shift matrix ``P_L(y)`` satisfies
``P_L(x + y) = P_L(x) P_L(y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .multiindex import (
    dim_g,
    graded_basis,
    homogeneous,
    madd,
    mbinom,
    mfact,
    mleq,
    mpow,
    msub,
)
from .ratcore import (
    GaussQ,
    I,
    RatMatrix,
    as_scalar,
    canonical_basis,
    conj,
    in_span,
    is_zero,
    re_part,
    im_part,
    real_kernel_basis,
    scalar_from_json,
    scalar_to_json,
    subspace_equal,
)

__all__ = [
    "MultiPoly",
    "PolynomialSpace",
    "minus_i_power",
    "diff_apply",
    "pascal_matrix",
    "bigD_matrix",
    "bigD_block",
    "bigD_numeric",
    "kernel_polynomials",
    "translate",
    "variable_names",
]

_MINUS_I_POW = (Fraction(1), -I, Fraction(-1), I)


def minus_i_power(k: int):
    """``(-i)**k`` as an exact scalar."""
    return _MINUS_I_POW[k % 4]


def variable_names(d: int) -> tuple:
    if d == 2:
        return ("x", "y")
    if d == 3:
        return ("x", "y", "z")
    return tuple(f"x{i + 1}" for i in range(d))


class MultiPoly:
    """Sparse polynomial in ``d`` variables with exact coefficients."""

    __slots__ = ("d", "terms")

    def __init__(self, d: int, terms: Mapping | None = None):
        self.d = d
        clean = {}
        if terms:
            for a, c in terms.items():
                a = tuple(int(x) for x in a)
                if len(a) != d or min(a, default=0) < 0:
                    raise ValueError(f"bad exponent {a} for d={d}")
                c = as_scalar(c)
                if not is_zero(c):
                    clean[a] = c
        self.terms = clean

    @classmethod
    def _trusted(cls, d, terms):
        p = cls.__new__(cls)
        p.d = d
        p.terms = terms
        return p

    @classmethod
    def const(cls, d: int, c=1) -> "MultiPoly":
        return cls(d, {(0,) * d: c})

    @classmethod
    def var(cls, d: int, i: int) -> "MultiPoly":
        a = [0] * d
        a[i] = 1
        return cls(d, {tuple(a): 1})

    @classmethod
    def monomial(cls, d: int, alpha, c=1) -> "MultiPoly":
        return cls(d, {tuple(alpha): c})

    @classmethod
    def zero(cls, d: int) -> "MultiPoly":
        return cls._trusted(d, {})

    # -- structure -------------------------------------------------------
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(a) for a in self.terms), default=-1)

    def low_degree(self) -> int:
        """Lowest degree of a non-zero term; ``-1`` for zero."""
        return min((sum(a) for a in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, alpha):
        return self.terms.get(tuple(alpha), Fraction(0))

    def homogeneous_part(self, k: int) -> "MultiPoly":
        return MultiPoly._trusted(self.d, {a: c for a, c in self.terms.items() if sum(a) == k})

    def truncate(self, L: int) -> "MultiPoly":
        return MultiPoly._trusted(self.d, {a: c for a, c in self.terms.items() if sum(a) <= L})

    def is_homogeneous(self) -> bool:
        return len({sum(a) for a in self.terms}) <= 1

    def is_real(self) -> bool:
        return not any(isinstance(c, GaussQ) for c in self.terms.values())

    def conj(self) -> "MultiPoly":
        return MultiPoly._trusted(self.d, {a: conj(c) for a, c in self.terms.items()})

    def real_part(self) -> "MultiPoly":
        return MultiPoly(self.d, {a: re_part(c) for a, c in self.terms.items()})

    def imag_part(self) -> "MultiPoly":
        return MultiPoly(self.d, {a: im_part(c) for a, c in self.terms.items()})

    # -- arithmetic ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.d == other.d and self.terms == other.terms
        if isinstance(other, (int, Fraction, GaussQ)):
            return self == MultiPoly.const(self.d, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.d, frozenset(self.terms.items())))

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.d != self.d:
                raise ValueError("dimension mismatch")
            return other
        return MultiPoly.const(self.d, other)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for a, c in other.terms.items():
            v = t.get(a, 0) + c
            if is_zero(v):
                t.pop(a, None)
            else:
                t[a] = v
        return MultiPoly._trusted(self.d, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._trusted(self.d, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = as_scalar(other)
            if is_zero(c):
                return MultiPoly.zero(self.d)
            return MultiPoly._trusted(self.d, {a: c * v for a, v in self.terms.items()})
        return self.mul_trunc(other, None)

    __rmul__ = __mul__

    def mul_trunc(self, other: "MultiPoly", L: int | None) -> "MultiPoly":
        """Product with all terms of degree above ``L`` discarded."""
        t: dict = {}
        for a, c in self.terms.items():
            da = sum(a)
            for b, e in other.terms.items():
                if L is not None and da + sum(b) > L:
                    continue
                k = madd(a, b)
                v = t.get(k, 0) + c * e
                if is_zero(v):
                    t.pop(k, None)
                else:
                    t[k] = v
        return MultiPoly._trusted(self.d, t)

    def pow_trunc(self, k: int, L: int | None = None) -> "MultiPoly":
        out = MultiPoly.const(self.d, 1)
        for _ in range(k):
            out = out.mul_trunc(self, L)
        return out

    def __pow__(self, k: int):
        return self.pow_trunc(k, None)

    def __truediv__(self, c):
        c = as_scalar(c)
        return self * (Fraction(1) / c)

    # -- calculus and substitution ----------------------------------------
    def __call__(self, *x):
        if len(x) == 1 and isinstance(x[0], (tuple, list, np.ndarray)):
            x = tuple(x[0])
        exact = _exact(x)
        s = 0
        for a, c in self.terms.items():
            if not exact:
                c = complex(c) if isinstance(c, GaussQ) else float(c)
            s = s + c * mpow(x, a)
        return s

    def diff(self, alpha) -> "MultiPoly":
        """Partial derivative ``D^alpha``."""
        alpha = tuple(alpha)
        t = {}
        for a, c in self.terms.items():
            if mleq(alpha, a):
                t[msub(a, alpha)] = c * mbinom(a, alpha) * mfact(alpha)
        return MultiPoly(self.d, t)

    def compose_linear(self, M: Sequence[Sequence]) -> "MultiPoly":
        """``P(M x)`` for an exact square matrix ``M``."""
        M = [[as_scalar(x) for x in row] for row in M]
        lin = [MultiPoly(self.d, {tuple(int(k == j) for k in range(self.d)): M[i][j] for j in range(self.d)}) for i in range(self.d)]
        out = MultiPoly.zero(self.d)
        cache: dict = {}
        for a, c in self.terms.items():
            term = MultiPoly.const(self.d, c)
            for i, ai in enumerate(a):
                if ai:
                    key = (i, ai)
                    if key not in cache:
                        cache[key] = lin[i] ** ai
                    term = term * cache[key]
            out = out + term
        return out

    def translate(self, h: Sequence) -> "MultiPoly":
        return translate(self, h)

    # -- vectors and I/O ---------------------------------------------------
    def to_vector(self, L: int | None = None) -> tuple:
        """Coefficient vector in the graded basis of degree ``L``."""
        L = self.degree() if L is None else L
        gb = graded_basis(self.d, max(L, 0))
        v = [Fraction(0)] * gb.size
        for a, c in self.terms.items():
            if sum(a) > L:
                raise ValueError("polynomial degree exceeds L")
            v[gb.position[a]] = c
        return tuple(v)

    @classmethod
    def from_vector(cls, d: int, vec: Sequence) -> "MultiPoly":
        L = 0
        while dim_g(d, L) < len(vec):
            L += 1
        if dim_g(d, L) != len(vec):
            raise ValueError("vector length is not a graded dimension")
        gb = graded_basis(d, L)
        return cls(d, {a: c for a, c in zip(gb.indices, vec)})

    def normalized(self) -> "MultiPoly":
        """Scale to a primitive form with positive first coefficient.

        The first coefficient is taken in graded-lex order; for rational
        polynomials denominators are cleared and the content removed.
        """
        if not self.terms:
            return self
        d = self.d
        first = min(self.terms, key=lambda a: (sum(a), [-x for x in a]))
        p = self
        if not p.is_real():
            p = p * (Fraction(1) / p.terms[first])
        if p.is_real():
            from math import gcd, lcm

            den = 1
            num = 0
            for c in p.terms.values():
                den = lcm(den, c.denominator)
            for c in p.terms.values():
                num = gcd(num, (c * den).numerator)
            p = p * Fraction(den, num)
            if p.terms[first] < 0:
                p = -p
        return MultiPoly._trusted(d, p.terms)

    def to_json(self) -> list:
        gb_order = sorted(self.terms, key=lambda a: (sum(a), [-x for x in a]))
        return [{"exp": list(a), "coef": scalar_to_json(self.terms[a])} for a in gb_order]

    @classmethod
    def from_json(cls, d: int, obj) -> "MultiPoly":
        return cls(d, {tuple(t["exp"]): scalar_from_json(t["coef"]) for t in obj})

    def to_str(self, names: Sequence[str] | None = None) -> str:
        names = variable_names(self.d) if names is None else names
        if not self.terms:
            return "0"
        order = sorted(self.terms, key=lambda a: (-sum(a), [-x for x in a]))
        parts = []
        for a in order:
            c = self.terms[a]
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, a) if e
            )
            if isinstance(c, GaussQ):
                cs = str(c)
                parts.append(f"+{cs}*{mono}" if mono else f"+{cs}")
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if mono and mag == 1:
                parts.append(f"{sign}{mono}")
            elif mono:
                parts.append(f"{sign}{mag}*{mono}")
            else:
                parts.append(f"{sign}{mag}")
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"MultiPoly({self.d}, {self.to_str()})"


def _exact(x) -> bool:
    return all(isinstance(v, (int, Fraction, GaussQ)) for v in x)


def diff_apply(P: MultiPoly, Q: MultiPoly) -> MultiPoly:
    """Apply the symbol ``P`` as the operator ``P(-iD)`` to ``Q``."""
    out = MultiPoly.zero(Q.d)
    for g, c in P.terms.items():
        dq = Q.diff(g)
        if not dq.is_zero():
            out = out + dq * (c * minus_i_power(sum(g)))
    return out


def translate(P: MultiPoly, h: Sequence) -> MultiPoly:
    """``x -> P(x + h)`` via the Taylor formula."""
    h = tuple(as_scalar(x) for x in h)
    out = MultiPoly.zero(P.d)
    for a, c in P.terms.items():
        for b in graded_basis(P.d, sum(a)).indices:
            if mleq(b, a):
                out = out + MultiPoly.monomial(P.d, b, c * mbinom(a, b) * mpow(h, msub(a, b)))
    return out


def pascal_matrix(y: Sequence, d: int, L: int) -> RatMatrix:
    """``P_L(y)`` with entry ``(j, k) = C(a_k, b_j) y^(a_k - b_j)``."""
    y = tuple(as_scalar(v) for v in y)
    idx = graded_basis(d, L).indices
    rows = []
    for b in idx:
        rows.append([mbinom(a, b) * mpow(y, msub(a, b)) if mleq(b, a) else 0 for a in idx])
    return RatMatrix(rows)


def _bigD_rows(S: MultiPoly, row_idx, col_idx):
    rows = []
    for b in row_idx:
        row = []
        for a in col_idx:
            if not mleq(b, a):
                row.append(Fraction(0))
                continue
            g = msub(a, b)
            s = S.terms.get(g)
            if s is None:
                row.append(Fraction(0))
            else:
                row.append(minus_i_power(sum(g)) * (mbinom(a, b) * mfact(g)) * s)
        rows.append(row)
    return rows


def bigD_matrix(S: MultiPoly, L: int) -> RatMatrix:
    """Matrix of ``S(-iD)`` on polynomials of degree at most ``L``."""
    idx = graded_basis(S.d, L).indices
    return RatMatrix._trusted(_bigD_rows(S, idx, idx), len(idx))


def bigD_block(S: MultiPoly, l: int, L: int) -> RatMatrix:
    """Rows of ``bigD_matrix`` indexed by the degree-``l`` monomials."""
    idx = graded_basis(S.d, L).indices
    return RatMatrix._trusted(_bigD_rows(S, homogeneous(S.d, l), idx), len(idx))


@lru_cache(maxsize=None)
def _bigD_template(d: int, L: int):
    idx = graded_basis(d, L).indices
    pos = graded_basis(d, L).position
    r, c, g, w = [], [], [], []
    for j, b in enumerate(idx):
        for k, a in enumerate(idx):
            if mleq(b, a):
                gam = msub(a, b)
                r.append(j)
                c.append(k)
                g.append(pos[gam])
                w.append(complex(minus_i_power(sum(gam))) * mbinom(a, b) * mfact(gam))
    return (np.array(r), np.array(c), np.array(g), np.array(w, dtype=complex), len(idx))


def bigD_numeric(jet: np.ndarray, d: int, L: int) -> np.ndarray:
    """Floating-point ``D_L S(0)`` from a graded coefficient vector ``jet``."""
    r, c, g, w, n = _bigD_template(d, L)
    M = np.zeros((n, n), dtype=complex)
    M[r, c] = w * jet[g]
    return M


@dataclass(frozen=True)
class PolynomialSpace:
    """Finite-dimensional real polynomial space with an exact basis."""

    d: int
    basis: tuple
    shift_invariant: bool | None = None
    scale_invariant: bool | None = None

    @classmethod
    def from_vectors(cls, d: int, vectors: Iterable[Sequence], **flags) -> "PolynomialSpace":
        polys = tuple(MultiPoly.from_vector(d, v).normalized() for v in vectors)
        return cls(d, polys, **flags)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def max_degree(self) -> int:
        return max((p.degree() for p in self.basis), default=-1)

    def vectors(self, L: int | None = None) -> list[tuple]:
        L = self.max_degree() if L is None else L
        return [p.to_vector(L) for p in self.basis]

    def contains(self, P: MultiPoly) -> bool:
        L = max(self.max_degree(), P.degree(), 0)
        return in_span(P.to_vector(L), self.vectors(L))

    def same_span(self, other: "PolynomialSpace") -> bool:
        L = max(self.max_degree(), other.max_degree(), 0)
        return subspace_equal(self.vectors(L), other.vectors(L), n=dim_g(self.d, L))

    def echelon(self) -> "PolynomialSpace":
        """Basis with distinct leading (highest-degree) monomials."""
        L = max(self.max_degree(), 0)
        n = dim_g(self.d, L)
        rev = [tuple(reversed(v)) for v in self.vectors(L)]
        ech = canonical_basis(rev, n)
        polys = tuple(MultiPoly.from_vector(self.d, tuple(reversed(v))).normalized() for v in ech)
        polys = tuple(sorted(polys, key=lambda p: _sort_key(p)))
        return PolynomialSpace(self.d, polys, self.shift_invariant, self.scale_invariant)

    def leading_degrees(self) -> list[int]:
        """Degrees of the leading forms, one per dimension, ascending."""
        return sorted(p.degree() for p in self.echelon().basis)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "dim": self.dim,
            "basis": [p.to_json() for p in self.basis],
            "shift_invariant": self.shift_invariant,
            "scale_invariant": self.scale_invariant,
        }

    def __str__(self):
        return "span{" + ", ".join(p.to_str() for p in self.basis) + "}"


def _sort_key(p: MultiPoly):
    lead = max(p.terms, key=lambda a: (sum(a), a))
    return (p.degree(), [-x for x in lead])


def kernel_polynomials(P: MultiPoly, L: int) -> PolynomialSpace:
    """Real polynomials of degree at most ``L`` annihilated by ``P(-iD)``."""
    ker = real_kernel_basis(bigD_matrix(P, L))
    return PolynomialSpace.from_vectors(P.d, ker)
