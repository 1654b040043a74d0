"""Exact arithmetic over Q and Q(i).

Scalars are either :class:`fractions.Fraction` (real) or :class:`GaussQ`
(non-real Gaussian rationals).  Every operation on a ``GaussQ`` returns a
plain ``Fraction`` when the imaginary part cancels, so real data never pays
for the complex code path.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

__all__ = [
    "GaussQ",
    "I",
    "RatMatrix",
    "as_scalar",
    "conj",
    "re_part",
    "im_part",
    "is_zero",
    "rat_to_str",
    "rat_from_str",
    "scalar_to_json",
    "scalar_from_json",
    "rref",
    "rank",
    "kernel_basis",
    "real_kernel_basis",
    "restrict_kernel",
    "canonical_basis",
    "in_span",
    "subspace_equal",
    "subspace_intersect",
]


class GaussQ:
    """Gaussian rational ``re + i*im`` with a non-zero imaginary part."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def make(re, im):
        """Return a ``Fraction`` when ``im == 0`` and a ``GaussQ`` otherwise."""
        if im == 0:
            return Fraction(re)
        return GaussQ(re, im)

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"

    def __str__(self):
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"

    def __eq__(self, other):
        if isinstance(other, GaussQ):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (Rational, int)):
            return False
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return True

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, GaussQ):
            return GaussQ.make(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return GaussQ(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussQ):
            return GaussQ.make(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return GaussQ(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussQ(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, GaussQ):
            return GaussQ.make(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Fraction(0)
            return GaussQ(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GaussQ):
            n = other.re * other.re + other.im * other.im
            return GaussQ.make(
                (self.re * other.re + self.im * other.im) / n,
                (self.im * other.re - self.re * other.im) / n,
            )
        if isinstance(other, (int, Fraction)):
            return GaussQ(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            n = self.re * self.re + self.im * self.im
            return GaussQ.make(other * self.re / n, -other * self.im / n)
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return Fraction(1) / (self ** (-k))
        out = Fraction(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return GaussQ(self.re, -self.im)


I = GaussQ(0, 1)


def as_scalar(x):
    """Coerce ``x`` to a canonical exact scalar."""
    if isinstance(x, GaussQ):
        return x
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return rat_from_str(x)
    if isinstance(x, complex):
        return GaussQ.make(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact scalar")


def conj(x):
    return x.conjugate() if isinstance(x, GaussQ) else x


def re_part(x):
    return x.re if isinstance(x, GaussQ) else Fraction(x)


def im_part(x):
    return x.im if isinstance(x, GaussQ) else Fraction(0)


def is_zero(x) -> bool:
    return not isinstance(x, GaussQ) and x == 0


def rat_to_str(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rat_from_str(s: str) -> Fraction:
    return Fraction(s.strip())


def scalar_to_json(x) -> dict:
    return {"re": rat_to_str(re_part(x)), "im": rat_to_str(im_part(x))}


def scalar_from_json(obj):
    if isinstance(obj, dict):
        return GaussQ.make(rat_from_str(obj["re"]), rat_from_str(obj.get("im", "0")))
    return as_scalar(obj)


class RatMatrix:
    """Dense exact matrix stored as a tuple of row tuples."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Sequence], cols: int | None = None):
        rows = tuple(tuple(as_scalar(x) for x in r) for r in data)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        self.rows = len(rows)
        self.cols = cols
        self.data = rows

    @classmethod
    def _trusted(cls, rows, cols):
        m = cls.__new__(cls)
        m.rows = len(rows)
        m.cols = cols
        m.data = tuple(tuple(r) for r in rows)
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        z = Fraction(0)
        return cls._trusted([[z] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls._trusted(
            [[Fraction(int(i == j)) for j in range(n)] for i in range(n)], n
        )

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.cols == other.cols and self.data == other.data

    def __hash__(self):
        return hash((self.cols, self.data))

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.data)
        return f"RatMatrix[{self.rows}x{self.cols}]({body})"

    @property
    def shape(self):
        return (self.rows, self.cols)

    def tolist(self):
        return [list(r) for r in self.data]

    def transpose(self) -> "RatMatrix":
        return RatMatrix._trusted(
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.rows,
        )

    T = property(transpose)

    def __add__(self, other):
        return RatMatrix._trusted(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
            self.cols,
        )

    def __sub__(self, other):
        return RatMatrix._trusted(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
            self.cols,
        )

    def scale(self, c) -> "RatMatrix":
        c = as_scalar(c)
        return RatMatrix._trusted([[c * a for a in r] for r in self.data], self.cols)

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            ot = other.transpose().data
            return RatMatrix._trusted(
                [[_dot(r, c) for c in ot] for r in self.data], other.cols
            )
        vec = tuple(as_scalar(x) for x in other)
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        return tuple(_dot(r, vec) for r in self.data)

    def is_real(self) -> bool:
        return not any(isinstance(x, GaussQ) for r in self.data for x in r)

    def real_part(self) -> "RatMatrix":
        return RatMatrix._trusted([[re_part(x) for x in r] for r in self.data], self.cols)

    def imag_part(self) -> "RatMatrix":
        return RatMatrix._trusted([[im_part(x) for x in r] for r in self.data], self.cols)

    def vstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows and other.rows and self.cols != other.cols:
            raise ValueError("column mismatch")
        cols = self.cols if self.rows else other.cols
        return RatMatrix._trusted(list(self.data) + list(other.data), cols)

    def to_complex(self):
        import numpy as np

        return np.array(
            [[complex(x) for x in r] for r in self.data], dtype=complex
        ).reshape(self.rows, self.cols)

    def to_json(self):
        return [[scalar_to_json(x) for x in r] for r in self.data]


def _dot(r, c):
    s = Fraction(0)
    for a, b in zip(r, c):
        if a and b:
            s = s + a * b
    return s


def _rref_rows(rows: list[list], cols: int):
    """In-place Gauss-Jordan elimination; returns pivot columns."""
    pivots = []
    nrows = len(rows)
    r = 0
    for c in range(cols):
        if r >= nrows:
            break
        p = None
        for i in range(r, nrows):
            if rows[i][c]:
                p = i
                break
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        if piv != 1:
            inv = Fraction(1) / piv
            rows[r] = [x * inv if x else x for x in rows[r]]
        prow = rows[r]
        nz = [j for j in range(c, cols) if prow[j]]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    row = rows[i]
                    for j in nz:
                        row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: RatMatrix):
    """Reduced row echelon form and pivot columns of ``m``."""
    rows = [list(r) for r in m.data]
    pivots = _rref_rows(rows, m.cols)
    return RatMatrix._trusted(rows, m.cols), tuple(pivots)


def rank(m: RatMatrix) -> int:
    return len(rref(m)[1])


def _kernel_from_rref(rows, pivots, cols):
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    zero = Fraction(0)
    for f in free:
        v = [zero] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x = rows[i][f]
            if x:
                v[p] = -x
        basis.append(tuple(v))
    return basis


def kernel_basis(m: RatMatrix) -> list[tuple]:
    """Canonical kernel basis over the field of the entries.

    One vector per free column in ascending order, with a 1 in that column
    and the negated RREF entries in the pivot columns.
    """
    rows = [list(r) for r in m.data]
    pivots = _rref_rows(rows, m.cols)
    return _kernel_from_rref(rows, pivots, m.cols)


def real_kernel_basis(m: RatMatrix) -> list[tuple]:
    """Basis of ``{v in Q^n : m v = 0}`` for a Gaussian-rational ``m``."""
    if m.is_real():
        return kernel_basis(m)
    return kernel_basis(m.real_part().vstack(m.imag_part()))


def restrict_kernel(basis: Sequence[Sequence], m: RatMatrix, real: bool = True):
    """Basis of ``{v in span(basis) : m v = 0}``.

    Cheaper than stacking when ``span(basis)`` is already small.
    """
    basis = [tuple(b) for b in basis]
    if not basis:
        return []
    images = [m @ b for b in basis]
    rows = [[images[j][i] for j in range(len(basis))] for i in range(m.rows)]
    small = RatMatrix._trusted(rows, len(basis)) if rows else RatMatrix.zeros(0, len(basis))
    coeffs = real_kernel_basis(small) if real else kernel_basis(small)
    n = len(basis[0])
    out = []
    for c in coeffs:
        v = [Fraction(0)] * n
        for cj, b in zip(c, basis):
            if cj:
                for k in range(n):
                    if b[k]:
                        v[k] = v[k] + cj * b[k]
        out.append(tuple(v))
    return out


def canonical_basis(vectors: Sequence[Sequence], n: int | None = None) -> list[tuple]:
    """Non-zero rows of the RREF of the stacked vectors."""
    vectors = [list(map(as_scalar, v)) for v in vectors]
    if not vectors:
        return []
    n = len(vectors[0]) if n is None else n
    piv = _rref_rows(vectors, n)
    return [tuple(vectors[i]) for i in range(len(piv))]


def _rank_of(vectors, n):
    vectors = [list(map(as_scalar, v)) for v in vectors]
    if not vectors:
        return 0
    return len(_rref_rows(vectors, n))


def in_span(v: Sequence, basis: Sequence[Sequence]) -> bool:
    n = len(v)
    if all(is_zero(as_scalar(x)) for x in v):
        return True
    return _rank_of(list(basis) + [v], n) == _rank_of(basis, n)


def subspace_equal(b1: Sequence[Sequence], b2: Sequence[Sequence], n: int | None = None) -> bool:
    """Exact equality of ``span(b1)`` and ``span(b2)``."""
    if n is None:
        n = len(b1[0]) if b1 else (len(b2[0]) if b2 else 0)
    r1 = _rank_of(b1, n)
    r2 = _rank_of(b2, n)
    return r1 == r2 == _rank_of(list(b1) + list(b2), n)


def subspace_intersect(b1: Sequence[Sequence], b2: Sequence[Sequence]) -> list[tuple]:
    """Canonical basis of ``span(b1) & span(b2)``."""
    if not b1 or not b2:
        return []
    n = len(b1[0])
    k1 = len(b1)
    cols = k1 + len(b2)
    rows = [
        [as_scalar(b1[j][i]) for j in range(k1)] + [-as_scalar(b[i]) for b in b2]
        for i in range(n)
    ]
    ker = kernel_basis(RatMatrix._trusted(rows, cols))
    vecs = []
    for c in ker:
        v = [Fraction(0)] * n
        for j in range(k1):
            if c[j]:
                for i in range(n):
                    v[i] = v[i] + c[j] * as_scalar(b1[j][i])
        vecs.append(v)
    return canonical_basis(vecs, n)
