"""Isotropic dilation matrices and their invariant quadratic forms.

For an isotropic dilation ``A`` with ``q = |det A|`` there is a symmetric
positive definite ``Q2`` with ``A Q2 A^T = q^(2/d) Q2``.  The form
``W(x) = x^T Q2 x`` then satisfies ``W(A^{-T} x) = q^(-2/d) W(x)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import floor, gcd, lcm
from typing import Sequence

import numpy as np

from .errors import (
    AmbiguousSolution,
    FactorizationGap,
    NoPositiveDefiniteSolution,
    NotDilation,
    NotIsotropic,
    RationalizationFailure,
)
from .polyops import MultiPoly
from .ratcore import RatMatrix, kernel_basis

log = logging.getLogger(__name__)

__all__ = [
    "IntMatrix",
    "IsotropyReport",
    "IsotropicDecomposition",
    "as_int_matrix",
    "det_exact",
    "inverse_exact",
    "mat_pow",
    "char_poly",
    "is_isotropic",
    "decompose",
    "quadratic_form",
    "invariance_check",
    "coset_reps",
    "factorize",
    "partition_check",
    "exact_root",
    "group_order",
]

IntMatrix = tuple


def as_int_matrix(A) -> IntMatrix:
    """Validate a square integer matrix and return it as nested tuples."""
    rows = [list(r) for r in A]
    d = len(rows)
    out = []
    for r in rows:
        if len(r) != d:
            raise NotDilation("matrix must be square")
        row = []
        for x in r:
            f = Fraction(x)
            if f.denominator != 1:
                raise NotDilation("matrix entries must be integers")
            row.append(int(f))
        out.append(tuple(row))
    return tuple(out)


def _mat(A) -> list:
    return [[Fraction(x) for x in r] for r in A]


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _transpose(A):
    return [list(r) for r in zip(*A)]


def det_exact(A) -> Fraction:
    """Determinant by fraction-exact elimination."""
    M = _mat(A)
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                for j in range(c, n):
                    M[i][j] -= f * M[c][j]
    return det


def inverse_exact(A) -> list:
    M = _mat(A)
    n = len(M)
    aug = [M[i] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            raise NotDilation("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [r[n:] for r in aug]


def mat_pow(A, j: int) -> list:
    """Exact ``A**j`` (negative powers allowed)."""
    M = _mat(A) if j >= 0 else inverse_exact(A)
    n = len(M)
    out = [[Fraction(int(i == k)) for k in range(n)] for i in range(n)]
    for _ in range(abs(j)):
        out = _matmul(out, M)
    return out


def char_poly(A) -> list:
    """Monic characteristic polynomial coefficients, highest degree first.

    Faddeev-LeVerrier recursion in exact arithmetic.
    """
    M = _mat(A)
    n = len(M)
    coeffs = [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    c = Fraction(1)
    for k in range(1, n + 1):
        Mk = _matmul(M, [[Mk[i][j] + c * ident[i][j] for j in range(n)] for i in range(n)])
        c = -sum(Mk[i][i] for i in range(n)) / k
        coeffs.append(c)
    return coeffs


def _poly_trim(p):
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def _poly_divmod(a, b):
    a = list(_poly_trim(a))
    b = _poly_trim(b)
    q = []
    while len(a) >= len(b):
        f = a[0] / b[0]
        q.append(f)
        for i in range(len(b)):
            a[i] -= f * b[i]
        a.pop(0)
    return (q or [Fraction(0)]), (_poly_trim(a) if a else [Fraction(0)])


def _poly_gcd(a, b):
    a, b = _poly_trim(a), _poly_trim(b)
    while any(b):
        _, r = _poly_divmod(a, b)
        a, b = b, r
    return [x / a[0] for x in a]


def _poly_eval_matrix(p, A):
    M = _mat(A)
    n = len(M)
    out = [[Fraction(0)] * n for _ in range(n)]
    for c in p:
        out = _matmul(out, M)
        for i in range(n):
            out[i][i] += c
    return out


@dataclass(frozen=True)
class IsotropyReport:
    isotropic: bool
    diagonalizable: bool
    moduli: tuple
    dilation: bool
    reason: str = ""


def is_isotropic(A, rtol: float = 1e-9) -> IsotropyReport:
    """Decide isotropy: diagonalizable over C with equal eigenvalue moduli.

    Diagonalizability is exact: the radical of the characteristic
    polynomial must annihilate ``A``.  Moduli are compared numerically.
    """
    A = as_int_matrix(A)
    p = char_poly(A)
    dp = [c * (len(p) - 1 - i) for i, c in enumerate(p[:-1])]
    g = _poly_gcd(p, dp) if len(p) > 1 else [Fraction(1)]
    rad, _ = _poly_divmod(p, g)
    diag = all(x == 0 for r in _poly_eval_matrix(rad, A) for x in r)
    mod = np.abs(np.linalg.eigvals(np.array(A, dtype=float)))
    dil = bool(np.all(mod > 1 + 1e-12)) and det_exact(A) != 0
    equal = bool(np.ptp(mod) <= rtol * np.max(mod)) if len(mod) else True
    reason = ""
    if not diag:
        reason = "not diagonalizable"
    elif not equal:
        reason = "eigenvalue moduli differ"
    return IsotropyReport(diag and equal, diag, tuple(float(x) for x in mod), dil, reason)


def exact_root(x: int, d: int) -> int | None:
    """Integer ``d``-th root of ``x`` when it exists."""
    if x < 0:
        return None
    r = round(x ** (1.0 / d))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**d == x:
            return c
    return None


@dataclass(frozen=True)
class IsotropicDecomposition:
    """``A^{-T} = q^{-1/d} Q^{-1} U Q`` with ``Q = Q2^(1/2)``."""

    A: IntMatrix
    q: int
    d: int
    Q2: RatMatrix
    Q: np.ndarray = field(compare=False)
    U: np.ndarray = field(compare=False)
    solution_dim: int = 1
    warnings: tuple = ()

    @property
    def scale(self):
        """``q^(2/d)`` as a Fraction when rational, else a float."""
        r = exact_root(self.q**2, self.d)
        return Fraction(r) if r is not None else self.q ** (2.0 / self.d)


def group_order(A, bound: int = 24) -> int | None:
    """Order of ``q^(-1/d) A`` in the matrix group, or None beyond ``bound``.

    ``n`` is the order iff ``A^n = q^(n/d) I`` exactly.
    """
    A = as_int_matrix(A)
    d = len(A)
    q = abs(int(det_exact(A)))
    P = [list(r) for r in A]
    for n in range(1, bound + 1):
        lam = P[0][0]
        scalar = all(P[i][j] == (lam if i == j else 0) for i in range(d) for j in range(d))
        if scalar and lam > 0 and Fraction(lam) ** d == Fraction(q) ** n:
            return n
        P = _matmul(P, A)
    return None


def _sym_unknowns(d):
    return [(i, j) for i in range(d) for j in range(i, d)]


def _is_pd_exact(X) -> bool:
    n = len(X)
    return all(det_exact([r[:k] for r in X[:k]]) > 0 for k in range(1, n + 1))


def _normalize_form(X):
    """Scale so the coefficients ``X_ii`` and ``2 X_ij`` are coprime integers."""
    n = len(X)
    coefs = [X[i][i] for i in range(n)] + [2 * X[i][j] for i in range(n) for j in range(i + 1, n)]
    den = 1
    for c in coefs:
        den = lcm(den, Fraction(c).denominator)
    num = 0
    for c in coefs:
        num = gcd(num, int(Fraction(c) * den))
    s = Fraction(den, num)
    return [[x * s for x in r] for r in X]


def _sqrtm_pd(X: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(X)
    return (V * np.sqrt(w)) @ V.T


def decompose(A) -> IsotropicDecomposition:
    """Invariant quadratic form and orthogonal part of an isotropic dilation."""
    A = as_int_matrix(A)
    rep = is_isotropic(A)
    if not rep.isotropic:
        raise NotIsotropic(rep.reason or "not isotropic")
    d = len(A)
    q = abs(int(det_exact(A)))
    warnings = []
    root = exact_root(q * q, d)
    if root is not None:
        X, sol_dim = _solve_exact(A, d, Fraction(root), warnings)
    else:
        X, sol_dim = _solve_numeric(A, d, q, warnings)
    X = _normalize_form(X)
    Q2 = RatMatrix(X)
    Xf = np.array([[float(v) for v in r] for r in X])
    Q = _sqrtm_pd(Xf)
    AinvT = np.linalg.inv(np.array(A, dtype=float)).T
    U = q ** (1.0 / d) * Q @ AinvT @ np.linalg.inv(Q)
    if not np.allclose(U @ U.T, np.eye(d), atol=1e-9):
        raise NotIsotropic("orthogonal factor check failed")
    for w in warnings:
        log.warning(w)
    return IsotropicDecomposition(A, q, d, Q2, Q, U, sol_dim, tuple(warnings))


def _solve_exact(A, d, c, warnings):
    unk = _sym_unknowns(d)
    Af = _mat(A)
    rows = []
    for a in range(d):
        for b in range(a, d):
            row = []
            for (i, j) in unk:
                # coefficient of X_ij in (A X A^T)_ab - c X_ab
                v = Af[a][i] * Af[b][j]
                if i != j:
                    v += Af[a][j] * Af[b][i]
                if (a, b) == (i, j):
                    v -= c
                row.append(v)
            rows.append(row)
    ker = kernel_basis(RatMatrix(rows))

    def to_mat(v):
        X = [[Fraction(0)] * d for _ in range(d)]
        for (i, j), x in zip(unk, v):
            X[i][j] = X[j][i] = x
        return X

    if not ker:
        raise NoPositiveDefiniteSolution("invariance equation has only the zero solution")
    if len(ker) == 1:
        X = to_mat(ker[0])
        if _is_pd_exact(X):
            return X, 1
        X = [[-x for x in r] for r in X]
        if _is_pd_exact(X):
            return X, 1
        raise NoPositiveDefiniteSolution("unique solution ray is indefinite")
    ident = tuple(Fraction(int(i == j)) for (i, j) in unk)
    from .ratcore import in_span

    if in_span(ident, ker):
        warnings.append(
            f"invariance equation has a {len(ker)}-dimensional solution space; identity chosen"
        )
        return to_mat(ident), len(ker)
    raise AmbiguousSolution(f"{len(ker)}-dimensional solution space without a canonical member")


def _solve_numeric(A, d, q, warnings):
    w, T = np.linalg.eig(np.array(A, dtype=float))
    Ti = np.linalg.inv(T)
    X = np.real(Ti.conj().T @ Ti)
    X = X / X[0, 0]
    Xr = [[Fraction(float(v)).limit_denominator(10**6) for v in r] for r in X]
    err = max(abs(float(a) - b) for ra, rb in zip(Xr, X) for a, b in zip(ra, rb))
    if err > 1e-9:
        raise RationalizationFailure(f"invariant form not rational (residual {err:.3g})")
    Af = np.array(A, dtype=float)
    Xf = np.array([[float(v) for v in r] for r in Xr])
    if not np.allclose(Af @ Xf @ Af.T, q ** (2.0 / d) * Xf, atol=1e-9):
        raise RationalizationFailure("rationalised form fails the invariance check")
    warnings.append("invariant form obtained numerically and rationalised")
    return Xr, 1


def quadratic_form(dec: IsotropicDecomposition) -> MultiPoly:
    """``W(x) = x^T Q2 x`` as an exact polynomial."""
    d = dec.d
    t = {}
    for i in range(d):
        for j in range(d):
            a = [0] * d
            a[i] += 1
            a[j] += 1
            a = tuple(a)
            t[a] = t.get(a, 0) + dec.Q2[i, j]
    return MultiPoly(d, t)


@dataclass(frozen=True)
class InvarianceReport:
    form_scaling: bool
    matrix_identity: bool
    inverse_identity: bool
    dual_identity: bool
    reconstruction_error: float

    @property
    def ok(self) -> bool:
        return (
            self.form_scaling
            and self.matrix_identity
            and self.inverse_identity
            and self.dual_identity
            and self.reconstruction_error < 1e-9
        )


def invariance_check(A, dec: IsotropicDecomposition) -> InvarianceReport:
    """Exact checks of the scaling identities plus the numeric factorization."""
    A = as_int_matrix(A)
    d = dec.d
    c = dec.scale
    X = dec.Q2.tolist()
    Af = _mat(A)
    At = _transpose(Af)
    exact = isinstance(c, Fraction)
    if exact:
        lhs = _matmul(_matmul(Af, X), At)
        m_ok = lhs == [[c * x for x in r] for r in X]
        Ai = inverse_exact(A)
        inv_ok = _matmul(_matmul(Ai, X), _transpose(Ai)) == [[x / c for x in r] for r in X]
        Xi = inverse_exact(X)
        dual_ok = _matmul(_matmul(At, Xi), Af) == [[c * x for x in r] for r in Xi]
        W = quadratic_form(dec)
        form_ok = W.compose_linear(_transpose(Ai)) == W * (Fraction(1) / c)
    else:
        Xf = np.array([[float(v) for v in r] for r in X])
        An = np.array(A, dtype=float)
        m_ok = np.allclose(An @ Xf @ An.T, c * Xf)
        inv_ok = np.allclose(np.linalg.inv(An) @ Xf @ np.linalg.inv(An).T, Xf / c)
        dual_ok = np.allclose(An.T @ np.linalg.inv(Xf) @ An, c * np.linalg.inv(Xf))
        form_ok = m_ok
    An = np.array(A, dtype=float)
    recon = dec.q ** (-1.0 / d) * np.linalg.inv(dec.Q) @ dec.U @ dec.Q
    err = float(np.max(np.abs(recon - np.linalg.inv(An).T)))
    return InvarianceReport(bool(form_ok), bool(m_ok), bool(inv_ok), bool(dual_ok), err)


def coset_reps(A) -> tuple:
    """``A^{-1}(Z^d & A[0,1)^d)`` with the zero vector first.

    These are the canonical representatives of ``A^{-1} Z^d / Z^d``.
    """
    A = as_int_matrix(A)
    d = len(A)
    Ai = inverse_exact(A)
    corners = [
        [sum(A[i][k] * e[k] for k in range(d)) for i in range(d)]
        for e in product((0, 1), repeat=d)
    ]
    lo = [min(c[i] for c in corners) for i in range(d)]
    hi = [max(c[i] for c in corners) for i in range(d)]
    reps = []
    for m in product(*[range(lo[i], hi[i] + 1) for i in range(d)]):
        s = tuple(sum(Ai[i][k] * m[k] for k in range(d)) for i in range(d))
        if all(0 <= x < 1 for x in s):
            reps.append(s)
    reps.sort(key=lambda s: (any(s), s))
    q = abs(int(det_exact(A)))
    if len(reps) != q:
        raise FactorizationGap(f"found {len(reps)} coset representatives, expected {q}")
    return tuple(reps)


def factorize(A, n: Sequence[int], max_j: int = 64):
    """Unique ``(j, s, k)`` with ``n = A^j (s + k)``, ``s`` a non-zero coset rep.

    ``j >= 1``, ``s`` in ``coset_reps(A)`` minus zero and ``k`` integral.
    """
    A = as_int_matrix(A)
    d = len(A)
    Ai = inverse_exact(A)
    v = [Fraction(x) for x in n]
    if not any(v):
        raise ValueError("zero has no factorization")
    for j in range(1, max_j + 1):
        v = [sum(Ai[i][k] * v[k] for k in range(d)) for i in range(d)]
        if any(x.denominator != 1 for x in v):
            k = tuple(floor(x) for x in v)
            s = tuple(x - kk for x, kk in zip(v, k))
            return j, s, k
    raise FactorizationGap(f"no factorization of {tuple(n)} with j <= {max_j}")


@dataclass(frozen=True)
class PartitionReport:
    ok: bool
    points: int
    max_j: int
    factors: dict = field(compare=False, repr=False)


def partition_check(A, N: int, max_j: int = 64) -> PartitionReport:
    """Factorize every non-zero ``n`` with ``|n|_inf <= N`` and validate it."""
    A = as_int_matrix(A)
    d = len(A)
    reps = set(coset_reps(A)[1:])
    factors = {}
    for n in product(range(-N, N + 1), repeat=d):
        if not any(n):
            continue
        j, s, k = factorize(A, n, max_j)
        if s not in reps:
            raise FactorizationGap(f"shift {s} of {n} is not a coset representative")
        Aj = mat_pow(A, j)
        back = tuple(sum(Aj[i][t] * (s[t] + k[t]) for t in range(d)) for i in range(d))
        if back != tuple(Fraction(x) for x in n):
            raise FactorizationGap(f"factorization of {n} does not reproduce it")
        factors[n] = (j, s, k)
    return PartitionReport(True, len(factors), max((f[0] for f in factors.values()), default=0), factors)
