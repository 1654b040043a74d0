"""Trigonometric polynomials, elliptic G-functions and refinement masks.

A :class:`TrigPoly` stores ``sum_k c_k exp(i k.xi / 2)`` with ``k`` on the
doubled lattice, so half-angle sines are representable exactly.  A
function is ``2*pi``-periodic iff every stored ``k`` is even.

The G-functions are built from the periodic sine monomials
``b_alpha(xi) = prod_i b_{alpha_i}(xi_i)`` with
``b_{2a}(t) = (2 sin(t/2))^{2a}`` and ``b_{2a+1}(t) = sin(t) (2 sin(t/2))^{2a}``.
Each ``b_alpha`` has Maclaurin series ``xi^alpha + (higher order)``, so any
prescribed jet can be matched degree by degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import (
    ConditionFailed,
    GVanishesAtCoset,
    NonPeriodicMask,
    UnderdeterminedCorrection,
    UnsupportedGroupOrder,
    UnsupportedShiftDenominator,
)
from .isotropic import (
    as_int_matrix,
    coset_reps,
    decompose,
    exact_root,
    group_order,
    mat_pow,
    quadratic_form,
)
from .multiindex import graded_basis, mfact
from .polyops import MultiPoly, kernel_polynomials
from .ratcore import GaussQ, I, as_scalar, conj, is_zero, scalar_to_json

__all__ = [
    "TrigPoly",
    "MaskSpec",
    "NonstationaryFamily",
    "sin_monomial",
    "substitute_sin_monomials",
    "synthesize_G",
    "build_G",
    "build_G_higher",
    "build_mask",
    "mask_power",
    "maclaurin_jet",
    "sin_form",
    "nonstationary_family",
    "nonneg_check",
    "elliptic_mask",
]

_PHASES = (Fraction(1), I, Fraction(-1), -I)


class TrigPoly:
    """Exact trigonometric polynomial on the doubled frequency lattice."""

    __slots__ = ("d", "coeffs")

    def __init__(self, d: int, coeffs: Mapping | None = None):
        self.d = d
        clean = {}
        for k, c in (coeffs or {}).items():
            k = tuple(int(x) for x in k)
            if len(k) != d:
                raise ValueError("frequency dimension mismatch")
            c = as_scalar(c)
            if not is_zero(c):
                clean[k] = c
        self.coeffs = clean

    @classmethod
    def _trusted(cls, d, coeffs):
        t = cls.__new__(cls)
        t.d = d
        t.coeffs = coeffs
        return t

    @classmethod
    def const(cls, d: int, c=1) -> "TrigPoly":
        return cls(d, {(0,) * d: c})

    @classmethod
    def exp_half(cls, d: int, k, c=1) -> "TrigPoly":
        """``c * exp(i k.xi / 2)`` for a doubled-lattice ``k``."""
        return cls(d, {tuple(k): c})

    @classmethod
    def _axis(cls, d, i, m, cp, cm):
        kp = [0] * d
        kp[i] = m
        km = [0] * d
        km[i] = -m
        return cls(d, {tuple(kp): cp, tuple(km): cm})

    @classmethod
    def cos(cls, d: int, i: int, mult: int = 1) -> "TrigPoly":
        """``cos(mult * xi_i)``."""
        h = Fraction(1, 2)
        return cls._axis(d, i, 2 * mult, h, h)

    @classmethod
    def sin(cls, d: int, i: int, mult: int = 1) -> "TrigPoly":
        """``sin(mult * xi_i)``."""
        return cls._axis(d, i, 2 * mult, GaussQ(0, Fraction(-1, 2)), GaussQ(0, Fraction(1, 2)))

    @classmethod
    def sin_half(cls, d: int, i: int) -> "TrigPoly":
        """``sin(xi_i / 2)`` (only ``4*pi``-periodic)."""
        return cls._axis(d, i, 1, GaussQ(0, Fraction(-1, 2)), GaussQ(0, Fraction(1, 2)))

    # -- algebra -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, TrigPoly):
            return self.d == other.d and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.d, frozenset(self.coeffs.items())))

    def _coerce(self, other):
        return other if isinstance(other, TrigPoly) else TrigPoly.const(self.d, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            v = out.get(k, 0) + c
            if is_zero(v):
                out.pop(k, None)
            else:
                out[k] = v
        return TrigPoly._trusted(self.d, out)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly._trusted(self.d, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TrigPoly):
            c = as_scalar(other)
            if is_zero(c):
                return TrigPoly(self.d)
            return TrigPoly._trusted(self.d, {k: c * v for k, v in self.coeffs.items()})
        out: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                v = out.get(k, 0) + c1 * c2
                if is_zero(v):
                    out.pop(k, None)
                else:
                    out[k] = v
        return TrigPoly._trusted(self.d, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TrigPoly":
        out = TrigPoly.const(self.d, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, c):
        return self * (Fraction(1) / as_scalar(c))

    # -- properties ----------------------------------------------------------
    def is_periodic(self) -> bool:
        """``2*pi``-periodicity: all doubled-lattice frequencies even."""
        return all(x % 2 == 0 for k in self.coeffs for x in k)

    def is_real_valued(self) -> bool:
        return all(
            self.coeffs.get(tuple(-x for x in k), Fraction(0)) == conj(c)
            for k, c in self.coeffs.items()
        )

    def has_real_coefficients(self) -> bool:
        return not any(isinstance(c, GaussQ) for c in self.coeffs.values())

    def value_at_zero(self):
        s = Fraction(0)
        for c in self.coeffs.values():
            s = s + c
        return s

    def shift(self, s: Sequence) -> "TrigPoly":
        """``xi -> T(xi + 2*pi*s)`` for a rational vector ``s``."""
        out = {}
        for k, c in self.coeffs.items():
            t = sum(Fraction(x) * Fraction(y) for x, y in zip(k, s))  # phase = pi * t
            q = t * 2
            if q.denominator != 1:
                raise UnsupportedShiftDenominator(
                    f"phase exp(i*pi*{t}) is not a fourth root of unity"
                )
            out[k] = c * _PHASES[int(q) % 4]
        return TrigPoly._trusted(self.d, out)

    def value_at_shift(self, s: Sequence):
        """Exact value ``T(2*pi*s)``."""
        return self.shift(s).value_at_zero()

    def __call__(self, xi) -> complex:
        xi = np.asarray(xi, dtype=float)
        ks = np.array(list(self.coeffs.keys()), dtype=float).reshape(-1, self.d)
        cs = np.array([complex(c) for c in self.coeffs.values()], dtype=complex)
        if xi.ndim == 1:
            return complex(np.sum(cs * np.exp(0.5j * ks @ xi)))
        return np.exp(0.5j * xi @ ks.T) @ cs

    def frequency_arrays(self):
        """``(K, c)`` with doubled-lattice frequencies and complex coefficients."""
        ks = np.array(list(self.coeffs.keys()), dtype=np.int64).reshape(-1, self.d)
        cs = np.array([complex(c) for c in self.coeffs.values()], dtype=complex)
        return ks, cs

    def support_radius(self) -> int:
        """Largest integer frequency magnitude (sup norm)."""
        return max((max(abs(x) for x in k) for k in self.coeffs), default=0) // 2

    # -- presentation ----------------------------------------------------------
    def to_json(self) -> dict:
        keys = sorted(self.coeffs)
        return {
            "periodic": self.is_periodic(),
            "terms": [{"k": list(k), **scalar_to_json(self.coeffs[k])} for k in keys],
        }

    def cos_sin_form(self) -> list:
        """Pairs ``(k, a_k, b_k)`` with ``T = sum a_k cos(k.xi) + b_k sin(k.xi)``.

        ``k`` ranges over integer frequencies in a half-space (first non-zero
        component positive) plus zero; only meaningful for periodic T.
        """
        out = []
        seen = set()
        for k in sorted(self.coeffs):
            if k in seen:
                continue
            nk = tuple(-x for x in k)
            seen.add(k)
            seen.add(nk)
            cp = self.coeffs.get(k, Fraction(0))
            cm = self.coeffs.get(nk, Fraction(0))
            key = k if next((x for x in k if x), 0) >= 0 else nk
            if key != k:
                cp, cm = cm, cp
            a = cp + cm if any(key) else cp
            b = (cp - cm) * I if any(key) else Fraction(0)
            out.append((tuple(x // 2 if x % 2 == 0 else Fraction(x, 2) for x in key), a, b))
        return sorted(out, key=lambda t: (sum(abs(x) for x in t[0]), t[0]))

    def __str__(self):
        parts = []
        for k, a, b in self.cos_sin_form():
            arg = "+".join(
                (f"{x}*xi{i+1}" if x != 1 else f"xi{i+1}") for i, x in enumerate(k) if x
            ).replace("+-", "-")
            if not any(k):
                parts.append(str(a))
                continue
            if not is_zero(a):
                parts.append(f"{a}*cos({arg})")
            if not is_zero(b):
                parts.append(f"{b}*sin({arg})")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"TrigPoly({self})"


def _b1(d, i, e) -> TrigPoly:
    """Univariate periodic sine monomial ``b_e(xi_i)``."""
    two_minus_2cos = TrigPoly.const(d, 2) - TrigPoly.cos(d, i) * 2
    out = two_minus_2cos ** (e // 2)
    if e % 2:
        out = out * TrigPoly.sin(d, i)
    return out


@lru_cache(maxsize=None)
def sin_monomial(alpha: tuple) -> TrigPoly:
    """``b_alpha``: periodic, real-coefficient-free of half angles, jet ``xi^alpha + ...``."""
    d = len(alpha)
    out = TrigPoly.const(d, 1)
    for i, e in enumerate(alpha):
        if e:
            out = out * _b1(d, i, e)
    return out


def substitute_sin_monomials(P: MultiPoly) -> TrigPoly:
    """Replace every monomial ``xi^alpha`` of ``P`` by ``b_alpha``."""
    out = TrigPoly(P.d)
    for a, c in P.terms.items():
        out = out + sin_monomial(a) * c
    return out


def sin_form(T: TrigPoly) -> MultiPoly:
    """The unique ``P`` with ``substitute_sin_monomials(P) == T``.

    The ``b_alpha`` with ``alpha_i <= 2 K_i`` form a basis of periodic
    trigonometric polynomials of frequency at most ``K_i`` in ``xi_i``,
    and each ``b_alpha`` starts at ``xi^alpha``, so ``P`` is read off the
    remainder's lowest-degree jet until the remainder vanishes.
    """
    if not T.is_periodic():
        raise NonPeriodicMask("sine-monomial form needs a periodic polynomial")
    d = T.d
    top = sum(max((abs(k[i]) for k in T.coeffs), default=0) for i in range(d))
    P = MultiPoly.zero(d)
    R = T
    while R.coeffs:
        jet = maclaurin_jet(R, top)
        if jet.is_zero():
            raise UnderdeterminedCorrection("remainder has no jet within the frequency bound")
        low = jet.homogeneous_part(jet.low_degree())
        P = P + low
        R = R - substitute_sin_monomials(low)
    return P


def maclaurin_jet(T: TrigPoly, L: int, M: Sequence[Sequence] | None = None) -> MultiPoly:
    """Exact Maclaurin polynomial of ``T(M eta)`` through degree ``L``.

    ``M`` defaults to the identity and must be rational.
    """
    d = T.d
    idx = graded_basis(d, L).indices
    Mt = None
    if M is not None:
        Mq = [[Fraction(x) for x in r] for r in M]
        Mt = [[Mq[j][i] for j in range(d)] for i in range(d)]
    acc: dict = {}
    ipow = (Fraction(1), I, Fraction(-1), -I)
    for k, c in T.coeffs.items():
        w = [Fraction(x, 2) for x in k]
        if Mt is not None:
            w = [sum(Mt[i][j] * w[j] for j in range(d)) for i in range(d)]
        for a in idx:
            m = Fraction(1)
            for wi, ai in zip(w, a):
                if ai:
                    m *= wi**ai
            if m:
                v = c * (m / mfact(a)) * ipow[sum(a) % 4]
                acc[a] = acc.get(a, 0) + v
    return MultiPoly(d, acc)


def synthesize_G(target: MultiPoly, exact_through: int, start: TrigPoly | None = None) -> TrigPoly:
    """Periodic trigonometric polynomial whose jet matches ``target``.

    The jet agrees with ``target`` through degree ``exact_through``.
    Starting from the sine-monomial substitution (or ``start``), each
    residual homogeneous part is removed by adding its own substitution,
    which leaves all lower degrees untouched.
    """
    G = substitute_sin_monomials(target) if start is None else start
    for deg in range(exact_through + 1):
        res = (target - maclaurin_jet(G, exact_through)).homogeneous_part(deg)
        if not res.is_zero():
            G = G + substitute_sin_monomials(res)
    if (target - maclaurin_jet(G, exact_through)).truncate(exact_through).terms:
        raise UnderdeterminedCorrection("residual jet could not be cancelled")
    return G


def build_G(Q2) -> TrigPoly:
    """``4 sum q_ii sin^2(xi_i/2) + 2 sum_{i<j} q_ij sin xi_i sin xi_j``."""
    d = Q2.rows
    t = {}
    for i in range(d):
        for j in range(d):
            a = [0] * d
            a[i] += 1
            a[j] += 1
            t[tuple(a)] = t.get(tuple(a), 0) + Q2[i, j]
    return substitute_sin_monomials(MultiPoly(d, t))


def build_G_higher(Q2, r: int, corrections: TrigPoly | None = None) -> TrigPoly:
    """G whose jet equals ``W`` through degree ``r - 1``.

    With ``corrections`` the caller's correction terms are added to the
    base G verbatim and the jet condition is checked.
    """
    W = _form_poly(Q2)
    if corrections is not None:
        G = build_G(Q2) + corrections
        if (maclaurin_jet(G, r - 1) - W).truncate(r - 1).terms:
            raise ConditionFailed("supplied corrections do not match W through degree r-1")
        return G
    return synthesize_G(W, r - 1, start=build_G(Q2))


def _form_poly(Q2) -> MultiPoly:
    d = Q2.rows
    t = {}
    for i in range(d):
        for j in range(d):
            a = [0] * d
            a[i] += 1
            a[j] += 1
            t[tuple(a)] = t.get(tuple(a), 0) + Q2[i, j]
    return MultiPoly(d, t)


def _mask_from_G(G: TrigPoly, reps_nonzero) -> TrigPoly:
    num = TrigPoly.const(G.d, 1)
    den = Fraction(1)
    for s in reps_nonzero:
        Gs = G.shift(s)
        num = num * Gs
        den = den * Gs.value_at_zero()
    if is_zero(den):
        raise GVanishesAtCoset("G vanishes at a non-zero coset point")
    m0 = num * (Fraction(1) / den)
    if not m0.is_periodic():
        raise NonPeriodicMask("mask is not 2*pi-periodic")
    return m0


class NonstationaryFamily:
    """Scale-dependent G-functions ``G_j`` and masks ``m0_j`` for ``j >= 0``.

    ``targets(j)`` gives the polynomial that the Maclaurin series of ``G_j``
    must match through degree ``exact_through``.
    """

    def __init__(self, A, kind: str, target: Callable[[int], MultiPoly], exact_through: int, params: dict):
        self.A = as_int_matrix(A)
        self.kind = kind
        self._target = target
        self.exact_through = exact_through
        self.params = params
        self._reps = coset_reps(tuple(zip(*self.A)))[1:]
        self._G: dict = {}
        self._m0: dict = {}

    def target(self, j: int) -> MultiPoly:
        return self._target(j)

    def G(self, j: int) -> TrigPoly:
        if j not in self._G:
            self._G[j] = synthesize_G(self._target(j), self.exact_through)
        return self._G[j]

    def m0(self, j: int) -> TrigPoly:
        if j not in self._m0:
            self._m0[j] = _mask_from_G(self.G(j), self._reps)
        return self._m0[j]


@dataclass
class MaskSpec:
    """Mask data for a stationary (``family is None``) or non-stationary scheme.

    The refinable function has ``phi_hat(xi) = prod_{j>=1} m0_j(A^{-jT} xi)``
    with ``m0_j = m0 ** order`` in the stationary case.
    """

    A: tuple
    G: TrigPoly
    m0: TrigPoly
    order: int = 1
    r: int = 4
    family: NonstationaryFamily | None = None
    W: MultiPoly | None = None
    meta: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return len(self.A)

    @property
    def stationary(self) -> bool:
        return self.family is None

    def G_at(self, j: int) -> TrigPoly:
        return self.G if self.family is None else self.family.G(j)

    def mask_at(self, j: int) -> TrigPoly:
        """Mask of the factor at scale ``j`` (power already applied)."""
        if self.family is None:
            return self.m0 if self.order == 1 else self._power()
        return self.family.m0(j) ** self.order if self.order != 1 else self.family.m0(j)

    def _power(self):
        if "_pow" not in self.meta:
            self.meta["_pow"] = self.m0**self.order
        return self.meta["_pow"]

    def default_lmax(self) -> int:
        if self.family is not None:
            return 2 * self.order + self.family.exact_through + 4
        return 2 * self.order + self.r + 2


def build_mask(G: TrigPoly, A) -> TrigPoly:
    """``m0(xi) = prod_s G(xi + 2 pi s) / prod_s G(2 pi s)`` over non-zero cosets of ``A^T``."""
    A = as_int_matrix(A)
    reps = coset_reps(tuple(zip(*A)))[1:]
    return _mask_from_G(G, reps)


def mask_power(m0: TrigPoly, m: int) -> TrigPoly:
    return m0**m


def elliptic_mask(A, order: int = 1, r: int = 4, corrections: TrigPoly | None = None) -> MaskSpec:
    """Stationary elliptic mask of an isotropic dilation."""
    A = as_int_matrix(A)
    dec = decompose(A)
    W = quadratic_form(dec)
    G = build_G(dec.Q2) if r <= 4 and corrections is None else build_G_higher(dec.Q2, r, corrections)
    m0 = build_mask(G, A)
    return MaskSpec(A, G, m0, order=order, r=r, W=W, meta={"Q2": dec.Q2, "decomposition": dec})


def nonstationary_family(A, kind: str, *, X: MultiPoly | None = None, m: int = 1, C: Mapping | None = None) -> MaskSpec:
    """Non-stationary elliptic scheme.

    ``kind="x_plus_wm"``: ``G_j(A^{-jT} xi)`` is proportional to
    ``X(xi) + W(xi)^m`` up to higher-order terms.  ``X`` is a homogeneous
    polynomial and some polynomial must be killed by one of ``X(-iD)``,
    ``W(-iD)^m`` but not by the other.

    ``kind="sum_of_powers"``: ``G_j(A^{-jT} xi)`` is proportional to
    ``sum_k C_k W(xi)^k`` up to terms of degree above ``2 k_max``.
    """
    A = as_int_matrix(A)
    dec = decompose(A)
    d = dec.d
    q = dec.q
    c = exact_root(q * q, d)
    if c is None:
        raise ConditionFailed("q^(2/d) must be rational for an exact family")
    c = Fraction(c)
    W = quadratic_form(dec)
    At = tuple(zip(*A))
    if kind == "x_plus_wm":
        if X is None or X.is_zero() or not X.is_homogeneous():
            raise ConditionFailed("X must be a non-zero homogeneous polynomial")
        k = X.degree()
        if k == 2 * m:
            raise ConditionFailed("deg X must differ from 2m")
        _check_condition(X, W, m, k)
        if group_order(A) not in (1, 2):
            raise UnsupportedGroupOrder("normalized dilation powers must have order 1 or 2")
        Wm = W**m

        def target(j, X=X, Wm=Wm):
            Aj = mat_pow(At, j)
            return X.compose_linear(Aj) * (c ** (-j * m)) + Wm

        fam = NonstationaryFamily(A, kind, target, max(2 * m, k), {"X": X, "m": m})
    elif kind == "sum_of_powers":
        if not C:
            raise ConditionFailed("coefficients C_k required")
        C = {int(kk): as_scalar(v) for kk, v in C.items() if not is_zero(as_scalar(v))}
        k1, k2 = min(C), max(C)
        if k1 < 1:
            raise ConditionFailed("powers must be positive")
        m = k1

        def target(j, C=C, k1=k1):
            out = MultiPoly.zero(d)
            for kk, ck in C.items():
                out = out + (W**kk) * (ck * c ** ((kk - k1) * j))
            return out

        fam = NonstationaryFamily(A, kind, target, 2 * k2, {"C": C})
    else:
        raise ValueError(f"unknown family kind {kind!r}")
    G0 = fam.G(0)
    m0 = fam.m0(0)
    return MaskSpec(A, G0, m0, order=1, r=fam.exact_through + 1, family=fam, W=W,
                    meta={"Q2": dec.Q2, "decomposition": dec, "m": m})


def _check_condition(X: MultiPoly, W: MultiPoly, m: int, k: int):
    """Some polynomial lies in exactly one of the two kernels."""
    Wm = W**m
    L = max(k, 2 * m) + 1
    kx = kernel_polynomials(X, L)
    kw = kernel_polynomials(Wm, L)
    if k < 2 * m:
        ok = any(not kw.contains(p) for p in kx.basis)
    else:
        ok = any(not kx.contains(p) for p in kw.basis)
    if not ok:
        raise ConditionFailed("no polynomial separates the kernels of X(-iD) and W(-iD)^m")


@dataclass(frozen=True)
class NonnegReport:
    min_value: float
    max_imag: float
    zero_only_at_lattice: bool
    grid: int


def nonneg_check(G: TrigPoly, grid: int = 64) -> NonnegReport:
    """Sample ``G`` on a uniform grid of ``[-pi, pi)^d``."""
    d = G.d
    ax = np.linspace(-np.pi, np.pi, grid, endpoint=False)
    pts = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), -1).reshape(-1, d)
    vals = G(pts)
    re = vals.real
    near0 = np.linalg.norm(pts, axis=1) < 1e-12
    away = re[~near0]
    return NonnegReport(float(re.min()), float(np.abs(vals.imag).max()), bool(away.size == 0 or away.min() > 0), grid)
