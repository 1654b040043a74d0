"""Refinable functions: Fourier jets, the cascade, and reproduction checks.

``phi_hat(xi) = prod_{j>=1} m0_j(A^{-jT} xi)``.  Two jet providers feed the
Strang-Fix machinery:

* :class:`NumericJets` multiplies the jets of the first ``J`` factors in
  floating point.  Truncating the product only multiplies the jet by an
  invertible series, so the kernel is unaffected.
* :class:`SymbolicJets` returns the exact jet of the single factor that
  vanishes at ``2 pi n``.  Writing ``n = (A^T)^j (s + k)``, that factor is
  ``G_j(A^{-jT} eta)`` (to the power ``order``); all remaining factors form
  an invertible series, so the kernel is again unchanged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, lcm
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix

from .errors import Divergence
from .isotropic import coset_reps, factorize, inverse_exact, mat_pow
from .masks import MaskSpec, TrigPoly, maclaurin_jet, sin_form
from .multiindex import graded_basis, madd
from .polyops import MultiPoly, PolynomialSpace, minus_i_power

log = logging.getLogger(__name__)

__all__ = [
    "NumericJets",
    "SymbolicJets",
    "CascadeGrid",
    "ReproductionReport",
    "jet_agreement",
    "cascade_eval",
    "fill_box",
    "verify_reproduction",
    "verify_annihilation",
    "subdivision_coefficients",
    "refinement_residual",
]


# -- graded jets, batched over lattice points -----------------------------------


@lru_cache(maxsize=None)
def _product_map(d: int, L: int):
    """Graded positions ``(i, j)`` with ``deg i + deg j <= L`` and the target matrix."""
    gb = graded_basis(d, L)
    src_i, src_j, dst = [], [], []
    for i, a in enumerate(gb.indices):
        for j, b in enumerate(gb.indices):
            if sum(a) + sum(b) <= L:
                src_i.append(i)
                src_j.append(j)
                dst.append(gb.position[madd(a, b)])
    n = len(dst)
    S = csr_matrix((np.ones(n), (dst, np.arange(n))), shape=(gb.size, n))
    return np.array(src_i), np.array(src_j), S


def _graded_mul(a: np.ndarray, b: np.ndarray, d: int, L: int) -> np.ndarray:
    """Row-wise truncated product of graded jets, shape ``(P, dim)``."""
    si, sj, S = _product_map(d, L)
    return (S @ (a[:, si] * b[:, sj]).T).T


def _unit(P: int, d: int, L: int) -> np.ndarray:
    out = np.zeros((P, graded_basis(d, L).size), dtype=complex)
    out[:, 0] = 1.0
    return out


@lru_cache(maxsize=None)
def _sin_cos_linear(coefs: tuple, d: int, L: int):
    """Graded jets of ``sin(l)``, ``cos(l)``, ``sin(l/2)``, ``cos(l/2)`` for ``l = coefs . eta``."""
    gb = graded_basis(d, L)
    lin = np.zeros((1, gb.size), dtype=complex)
    for k, c in enumerate(coefs):
        e = [0] * d
        e[k] = 1
        if L >= 1:
            lin[0, gb.position[tuple(e)]] = c
    powers = [_unit(1, d, L)]
    for _ in range(L):
        powers.append(_graded_mul(powers[-1], lin, d, L))
    out = []
    for half in (1.0, 0.5):
        zero = np.zeros(gb.size, dtype=complex)
        sn = sum((((-1) ** (m // 2)) * half**m / factorial(m) * powers[m][0] for m in range(1, L + 1, 2)), zero)
        cs = sum((((-1) ** (m // 2)) * half**m / factorial(m) * powers[m][0] for m in range(0, L + 1, 2)), zero)
        out.extend([sn, cs])
    return tuple(out)


def _sin_cos_pi(num: np.ndarray, den: int):
    """``sin(pi x), cos(pi x)`` for ``x = num/den`` after exact reduction to ``|x| <= 1/2``."""
    n0 = (2 * num + den) // (2 * den)
    delta = np.array([float(v) for v in (num - n0 * den)]) / float(den)
    sign = np.where(np.array([int(v) % 2 for v in n0]) == 1, -1.0, 1.0)
    return sign * np.sin(np.pi * delta), sign * np.cos(np.pi * delta)


class NumericJets:
    """Floating-point jets of ``phi_hat`` at ``2 pi n`` from ``J`` factors.

    Each factor is evaluated as a product of shifted G-functions written in
    the periodic sine-monomial basis, with the sines taken at exactly
    reduced rational multiples of ``pi``.  This keeps relative accuracy for
    families whose G-coefficients grow with the scale.
    """

    exact = False

    def __init__(self, spec: MaskSpec, J: int = 30):
        self.spec = spec
        self.J = J
        self.d = spec.d
        self.A = spec.A
        self._At = tuple(zip(*spec.A))
        self._reps = coset_reps(self._At)[1:]
        self._forms: dict = {}
        self._mats: dict = {}

    def _form(self, j):
        """``(sine-monomial terms, normalizing constant)`` of the scale-``j`` mask."""
        if j not in self._forms:
            G = self.spec.G_at(j)
            den = Fraction(1)
            for s in self._reps:
                den = den * G.shift(s).value_at_zero()
            terms = [(a, complex(c)) for a, c in sorted(sin_form(G).terms.items())]
            self._forms[j] = (terms, complex(den))
        return self._forms[j]

    def _M(self, j):
        if j not in self._mats:
            Mj = mat_pow(self._At, -j)
            D = 1
            for r in Mj:
                for x in r:
                    D = lcm(D, x.denominator)
            self._mats[j] = (Mj, D, tuple(tuple(float(x) for x in r) for r in Mj))
        return self._mats[j]

    def shifted_G(self, j: int, s: Sequence, pts: np.ndarray, L: int) -> np.ndarray:
        """Jets of ``G_j(A^{-jT}(2 pi n + eta) + 2 pi s)`` for every row ``n``."""
        d = self.d
        Mj, D, Mf = self._M(j)
        Ds = D
        for x in s:
            Ds = lcm(Ds, Fraction(x).denominator)
        MD = np.array([[int(x * Ds) for x in r] for r in Mj], dtype=object)
        num = MD @ pts.T.astype(object) + np.array([[int(Fraction(x) * Ds)] for x in s], dtype=object)
        P = pts.shape[0]
        sin_t, half = [], []
        for i in range(d):
            sl, cl, sh, ch = _sin_cos_linear(Mf[i], d, L)
            s2, c2 = _sin_cos_pi(2 * num[i], Ds)
            s1, c1 = _sin_cos_pi(num[i], Ds)
            sin_t.append(s2[:, None] * cl[None, :] + c2[:, None] * sl[None, :])
            h = 2 * (s1[:, None] * ch[None, :] + c1[:, None] * sh[None, :])
            half.append(_graded_mul(h, h, d, L))
        terms, _ = self._form(j)
        powers = [[_unit(P, d, L)] for _ in range(d)]
        out = np.zeros((P, graded_basis(d, L).size), dtype=complex)
        for a, c in terms:
            t = _unit(P, d, L)
            for i, e in enumerate(a):
                while len(powers[i]) <= e // 2:
                    powers[i].append(_graded_mul(powers[i][-1], half[i], d, L))
                if e // 2:
                    t = _graded_mul(t, powers[i][e // 2], d, L)
                if e % 2:
                    t = _graded_mul(t, sin_t[i], d, L)
            out += c * t
        return out

    def factor(self, j: int, pts: np.ndarray, L: int, exclude: Sequence | None = None) -> np.ndarray:
        """Jets of the scale-``j`` factor ``m0_j(A^{-jT}(2 pi n + eta))``.

        With ``exclude`` the G-factor of that shift is left out.
        """
        d = self.d
        _, den = self._form(j)
        acc = _unit(pts.shape[0], d, L)
        for s in self._reps:
            if exclude is not None and s == tuple(exclude):
                continue
            acc = _graded_mul(acc, self.shifted_G(j, s, pts, L), d, L)
        acc = acc / den
        base = acc
        for _ in range(self.spec.order - 1):
            acc = _graded_mul(acc, base, d, L)
        return acc

    def jets(self, pts: Sequence[Sequence[int]], L: int, skip: int | None = None):
        """Jets of the ``J``-factor product at every row of ``pts``.

        Returns graded coefficient rows ``(P, dim)`` and, per point, the sup
        distance of the last factor from the constant 1.
        """
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, self.d)
        acc = _unit(len(pts), self.d, L)
        f = acc
        for j in range(1, self.J + 1):
            if j == skip:
                continue
            f = self.factor(j, pts, L)
            acc = _graded_mul(acc, f, self.d, L)
        return acc, np.max(np.abs(f - _unit(1, self.d, L)), axis=1)

    def jet(self, n: Sequence[int], L: int):
        """Graded jet coefficients of ``phi_hat(2 pi n + eta)`` and a tail estimate."""
        v, err = self.jets([n], L)
        return v[0], float(err[0])

    def vanishing_level(self, n: Sequence[int]) -> int:
        return factorize(self._At, n)[0]


class SymbolicJets:
    """Exact jet of the vanishing factor of ``phi_hat`` at ``2 pi n``."""

    exact = True

    def __init__(self, spec: MaskSpec):
        self.spec = spec
        self.d = spec.d
        self.A = spec.A
        self._At = tuple(zip(*spec.A))
        self._cache: dict = {}

    def level(self, n: Sequence[int]):
        return factorize(self._At, n)

    def jet(self, n: Sequence[int], L: int) -> MultiPoly:
        j, _, _ = self.level(n)
        key = (j, L)
        if key not in self._cache:
            G = self.spec.G_at(j)
            M = mat_pow(self._At, -j)
            F = maclaurin_jet(G, L, M)
            self._cache[key] = F.pow_trunc(self.spec.order, L) if self.spec.order > 1 else F
        return self._cache[key]


def jet_agreement(spec: MaskSpec, n: Sequence[int], L: int, J: int = 30) -> float:
    """Relative mismatch between the numeric jet and exact-factor x numeric-rest.

    The numeric rest multiplies every factor except the vanishing one and,
    inside that mask, every G-factor except the vanishing shift.
    """
    nj = NumericJets(spec, J)
    sj = SymbolicJets(spec)
    d = spec.d
    j, s, _ = sj.level(n)
    pts = np.asarray([n], dtype=np.int64)
    full, _ = nj.jets(pts, L)
    rest, _ = nj.jets(pts, L, skip=j)
    vanishing = next(sp for sp in nj._reps if all((a + b).denominator == 1 for a, b in zip(s, sp)))
    _, den = nj._form(j)
    other = _unit(1, d, L)
    for sp in nj._reps:
        if sp != vanishing:
            other = _graded_mul(other, nj.shifted_G(j, sp, pts, L), d, L)
    other = other / den
    base = other
    for _ in range(spec.order - 1):
        other = _graded_mul(other, base, d, L)
    F = np.array([[complex(sj.jet(n, L).coeff(a)) for a in graded_basis(d, L).indices]])
    recon = _graded_mul(_graded_mul(F, other, d, L), rest, d, L)
    scale = max(float(np.max(np.abs(full))), 1e-300)
    return float(np.max(np.abs(recon - full)) / scale)


# -- cascade ----------------------------------------------------------------------


def subdivision_coefficients(mask: TrigPoly, q: int) -> dict:
    """``a_k`` with ``m0(xi) = (1/q) sum_k a_k exp(-i k.xi)``; they sum to ``q``."""
    if not mask.is_periodic():
        raise ValueError("mask must be 2*pi periodic")
    out = {}
    for k, c in mask.coeffs.items():
        kk = tuple(-(x // 2) for x in k)
        out[kk] = complex(c) * q
    return out


@dataclass
class CascadeGrid:
    """Values of ``phi`` on ``A^{-J} Z^d`` (integer labels ``m``)."""

    A: tuple
    J: int
    labels: np.ndarray
    values: np.ndarray
    level_diffs: list = field(default_factory=list)

    @property
    def d(self) -> int:
        return self.labels.shape[1]

    @property
    def points(self) -> np.ndarray:
        AJ = np.array([[float(x) for x in r] for r in mat_pow(self.A, -self.J)])
        return self.labels @ AJ.T

    def lookup(self) -> dict:
        return {tuple(m): v for m, v in zip(self.labels.tolist(), self.values)}

    def in_box(self, lo: float, hi: float) -> "CascadeGrid":
        p = self.points
        keep = np.all((p >= lo - 1e-12) & (p <= hi + 1e-12), axis=1)
        return CascadeGrid(self.A, self.J, self.labels[keep], self.values[keep], self.level_diffs)

    def partition_error(self) -> float:
        """Max deviation of ``sum_k phi(x - k)`` from 1 over all grid points."""
        AJ = np.array(mat_pow(self.A, self.J), dtype=object).astype(np.int64)
        # x - k has label m - A^J k; reduce each label modulo A^J Z^d
        inv = np.array([[float(x) for x in r] for r in mat_pow(self.A, -self.J)])
        frac = self.labels @ inv.T
        k = np.floor(frac + 1e-9).astype(np.int64)
        reps = self.labels - k @ AJ.T
        keys, inverse = np.unique(reps, axis=0, return_inverse=True)
        sums = np.zeros(len(keys), dtype=complex)
        np.add.at(sums, inverse.ravel(), self.values)
        return float(np.max(np.abs(sums - 1.0)))

    def mass(self) -> complex:
        q = abs(round(np.linalg.det(np.array(self.A, dtype=float))))
        return complex(np.sum(self.values) / q**self.J)


def _subdivide(labels, values, A, coefs):
    Ak = labels @ np.array(A, dtype=np.int64).T
    offs = np.array(list(coefs.keys()), dtype=np.int64)
    cv = np.array(list(coefs.values()), dtype=complex)
    new_labels = (Ak[:, None, :] + offs[None, :, :]).reshape(-1, labels.shape[1])
    new_vals = (values[:, None] * cv[None, :]).ravel()
    keys, inverse = np.unique(new_labels, axis=0, return_inverse=True)
    out = np.zeros(len(keys), dtype=complex)
    np.add.at(out, inverse.ravel(), new_vals)
    keep = np.abs(out) > 0
    return keys[keep], out[keep]


def cascade_eval(spec: MaskSpec, J: int, box: tuple | None = None) -> CascadeGrid:
    """Run ``J`` subdivision steps from the unit impulse.

    ``v_{t+1}[m] = sum_k a_{m - A k} v_t[k]``; after ``J`` steps
    ``v_J[m]`` approximates ``phi(A^{-J} m)``.  Raises :class:`Divergence`
    when the sup difference between successive levels grows three times
    in a row.
    """
    if not spec.stationary:
        raise ValueError("cascade requires a stationary mask")
    mask = spec.mask_at(1)
    d = spec.d
    q = abs(round(np.linalg.det(np.array(spec.A, dtype=float))))
    coefs = subdivision_coefficients(mask, q)
    labels = np.zeros((1, d), dtype=np.int64)
    values = np.ones(1, dtype=complex)
    diffs = []
    A = np.array(spec.A, dtype=np.int64)
    for _ in range(J):
        prev = dict(zip(map(tuple, (labels @ A.T).tolist()), values))
        labels, values = _subdivide(labels, values, spec.A, coefs)
        cur = dict(zip(map(tuple, labels.tolist()), values))
        diffs.append(max(abs(cur.get(k, 0) - v) for k, v in prev.items()))
        if len(diffs) >= 4 and diffs[-1] > diffs[-2] > diffs[-3] > diffs[-4] and diffs[-1] > 1:
            raise Divergence(f"cascade level differences growing: {diffs[-4:]}")
    grid = CascadeGrid(spec.A, J, labels, values, diffs)
    if box is not None:
        grid = fill_box(grid, box)
    return grid


def fill_box(grid: CascadeGrid, box) -> CascadeGrid:
    """Grid restricted to ``[lo, hi]^d`` with every lattice point present (zeros off support)."""
    lo, hi = box
    d = grid.d
    AJ = np.array(mat_pow(grid.A, grid.J), dtype=object).astype(np.int64)
    corners = np.array(list(np.ndindex(*(2,) * d))) * (hi - lo) + lo
    img = corners @ AJ.T
    mn = np.floor(img.min(axis=0)).astype(int)
    mx = np.ceil(img.max(axis=0)).astype(int)
    axes = [np.arange(a, b + 1) for a, b in zip(mn, mx)]
    labels = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, d)
    inv = np.array([[float(x) for x in r] for r in mat_pow(grid.A, -grid.J)])
    pts = labels @ inv.T
    keep = np.all((pts >= lo - 1e-12) & (pts <= hi + 1e-12), axis=1)
    labels = labels[keep]
    table = grid.lookup()
    vals = np.array([table.get(tuple(m), 0.0) for m in labels.tolist()], dtype=complex)
    return CascadeGrid(grid.A, grid.J, labels, vals, grid.level_diffs)


@dataclass(frozen=True)
class ReproductionReport:
    residual: float
    scale: float
    shifts: int
    points: int

    @property
    def relative(self) -> float:
        return self.residual / self.scale if self.scale else self.residual


def verify_reproduction(grid: CascadeGrid, P: MultiPoly, window: float = 2.0, margin: float = 0.0) -> ReproductionReport:
    """Least-squares fit of ``P`` by integer shifts of ``phi`` on a window.

    Every shift whose support meets ``[-window, window]^d`` is used; the
    sup residual is taken over grid points at distance at least ``margin``
    from the window boundary.
    """
    d = grid.d
    AJ = np.array(mat_pow(grid.A, grid.J), dtype=object).astype(np.int64)
    table = grid.lookup()
    full = fill_box(grid, (-window, window))
    lab = full.labels
    x = full.points
    # support of phi in label space, converted to a bound on shifts
    nz = np.abs(grid.values) > 0
    supp = np.max(np.abs(grid.points[nz])) if np.any(nz) else 0.0
    R = int(np.ceil(window + supp)) + 1
    shifts = [k for k in np.ndindex(*(2 * R + 1,) * d)]
    shifts = np.array(shifts) - R
    cols = []
    used = []
    for k in shifts:
        lk = lab - AJ @ k
        col = np.array([table.get(tuple(m), 0.0) for m in lk.tolist()], dtype=complex)
        if np.any(col != 0):
            cols.append(col.real)
            used.append(k)
    B = np.array(cols).T
    y = np.array([float(P(tuple(p))) for p in x])
    c, *_ = np.linalg.lstsq(B, y, rcond=None)
    res = np.abs(B @ c - y)
    inner = np.all(np.abs(x) <= window - margin + 1e-12, axis=1)
    r = float(res[inner].max()) if np.any(inner) else 0.0
    return ReproductionReport(r, float(np.max(np.abs(y))) if y.size else 0.0, len(used), int(inner.sum()))


def verify_annihilation(spec: MaskSpec, space: PolynomialSpace | Sequence[MultiPoly], N: int = 2, J: int = 30) -> float:
    """``max |P(-iD) phi_hat(2 pi n)|`` over the basis and the window.

    Each polynomial is scaled to unit maximal coefficient first.
    """
    from .strangfix import window_points

    polys = space.basis if isinstance(space, PolynomialSpace) else list(space)
    if not polys:
        return 0.0
    L = max(p.degree() for p in polys)
    nj = NumericJets(spec, J)
    gb = graded_basis(spec.d, L)
    worst = 0.0
    jets = nj.jets(window_points(spec.d, N), L)[0]
    for p in polys:
        scale = max(abs(complex(c)) for c in p.terms.values())
        w = np.zeros(gb.size, dtype=complex)
        for a, c in p.terms.items():
            w[gb.position[a]] = complex(c) * complex(minus_i_power(sum(a))) * float(np.prod([factorial(x) for x in a])) / scale
        for jt in jets:
            worst = max(worst, abs(complex(np.dot(w, jt))))
    return worst


def refinement_residual(grid: CascadeGrid, spec: MaskSpec) -> float:
    """``max |phi(x) - sum_k a_k phi(A x - k)|`` over ``x`` in ``A^{-(J-1)} Z^d``.

    Both sides are read from the level-``J`` grid, so the value measures how
    far the cascade is from an exact solution of the refinement equation.
    """
    if grid.J < 2:
        raise ValueError("need at least two cascade levels")
    q = abs(round(np.linalg.det(np.array(spec.A, dtype=float))))
    coefs = subdivision_coefficients(spec.mask_at(1), q)
    A = np.array(spec.A, dtype=np.int64)
    AJ = np.array(mat_pow(spec.A, grid.J), dtype=object).astype(np.int64)
    keys, vals = _encoder(grid.labels, grid.values)
    # coarse labels m with A m on the grid
    inv = np.array([[float(x) for x in r] for r in inverse_exact(spec.A)])
    coarse = np.rint(grid.labels @ inv.T).astype(np.int64)
    on = np.all(coarse @ A.T == grid.labels, axis=1)
    m = coarse[on]
    lhs = grid.values[on]
    base = m @ (A @ A).T
    rhs = np.zeros(len(m), dtype=complex)
    for k, a in coefs.items():
        rhs += a * _gather(keys, vals, base - AJ @ np.array(k))
    return float(np.max(np.abs(lhs - rhs))) if len(m) else 0.0


_OFF = 1 << 20


def _encode(labels: np.ndarray) -> np.ndarray:
    out = np.zeros(len(labels), dtype=np.int64)
    for i in range(labels.shape[1]):
        out = out * (2 * _OFF) + (labels[:, i] + _OFF)
    return out


def _encoder(labels, values):
    codes = _encode(labels)
    order = np.argsort(codes)
    return codes[order], values[order]


def _gather(keys, vals, labels) -> np.ndarray:
    """Values at ``labels`` (zero where absent) from sorted encoded keys."""
    c = _encode(labels)
    pos = np.clip(np.searchsorted(keys, c), 0, len(keys) - 1)
    hit = keys[pos] == c
    return np.where(hit, vals[pos], 0.0)
