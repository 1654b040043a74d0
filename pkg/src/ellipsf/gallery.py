"""Named dilation matrices and ready-made mask constructions."""

from __future__ import annotations

from fractions import Fraction

from .masks import MaskSpec, TrigPoly, elliptic_mask, nonstationary_family
from .polyops import MultiPoly
from .ratcore import I

__all__ = [
    "QUINCUNX",
    "SECOND",
    "DIAG2",
    "MATRICES",
    "quincunx_corrections",
    "higher_quincunx",
    "nonstat_quincunx",
    "nonstat_diag",
    "sum_of_powers_quincunx",
    "literal_diag_G",
]

QUINCUNX = ((1, 1), (1, -1))
SECOND = ((1, -2), (1, 0))
DIAG2 = ((2, 0), (0, 2))

MATRICES = {"quincunx": QUINCUNX, "second": SECOND, "diag2": DIAG2}


def _half_sin_powers(e: int, c) -> TrigPoly:
    return (TrigPoly.sin_half(2, 0) ** e + TrigPoly.sin_half(2, 1) ** e) * c


def quincunx_corrections(r: int) -> TrigPoly:
    """Correction terms added to ``4 (sin^2(x1/2) + sin^2(x2/2))`` for degree ``r``."""
    if r == 6:
        return _half_sin_powers(4, Fraction(4, 3))
    if r == 8:
        return _half_sin_powers(4, Fraction(4, 3)) + _half_sin_powers(6, Fraction(32, 45))
    raise ValueError("tabulated corrections exist for r = 6 and r = 8")


def higher_quincunx(r: int) -> MaskSpec:
    return elliptic_mask(QUINCUNX, r=r, corrections=quincunx_corrections(r))


def nonstat_quincunx() -> MaskSpec:
    """``G_j(A^{-jT} xi) ~ 2 i xi_1 + |xi|^2``."""
    return nonstationary_family(QUINCUNX, "x_plus_wm", X=MultiPoly(2, {(1, 0): 2 * I}), m=1)


def nonstat_diag() -> MaskSpec:
    """``G_j(A^{-jT} xi) ~ |xi|^2 + i (xi_1^3 + xi_2^3)``."""
    return nonstationary_family(DIAG2, "x_plus_wm", X=MultiPoly(2, {(3, 0): I, (0, 3): I}), m=1)


def sum_of_powers_quincunx(C=None) -> MaskSpec:
    return nonstationary_family(QUINCUNX, "sum_of_powers", C=C or {1: 1, 2: 1})


def literal_diag_G(j: int) -> TrigPoly:
    """``4 2^{-j} (sin^2(x1/2) + sin^2(x2/2)) + 8 i (sin^3(x1/2) + sin^3(x2/2))``.

    Odd powers of half-angle sines are not ``2 pi``-periodic, so masks built
    from this G are rejected.
    """
    return _half_sin_powers(2, Fraction(4, 2**j)) + _half_sin_powers(3, 8 * I)
