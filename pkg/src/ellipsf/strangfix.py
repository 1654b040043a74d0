"""Strang-Fix conditions and the reproduced polynomial space.

The polynomials of degree at most ``L`` reproduced by the shifts of a
refinable function form the kernel of ``Delta_L``, the stack of
``D_L phi_hat(2 pi n)`` over non-zero lattice points ``n``.  Only the jet
of ``phi_hat`` at ``2 pi n`` enters, so any jet provider works:

* an exact provider returns ``MultiPoly`` jets (``provider.exact = True``);
* a numeric provider returns graded complex coefficient arrays.

The order is found from a single kernel at degree ``l_max``: the
intersection with polynomials of degree ``<= l`` is the kernel at degree
``l``, so the whole dimension sequence follows from one echelon form.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Protocol, Sequence

import numpy as np
from scipy.linalg import subspace_angles

from .errors import DefinitionMismatch, NoStabilization, OrderExceedsBound
from .multiindex import dim_g, dim_h, graded_basis
from .polyops import MultiPoly, PolynomialSpace, bigD_block, bigD_matrix, bigD_numeric
from .ratcore import (
    RatMatrix,
    canonical_basis,
    in_span,
    rank,
    real_kernel_basis,
    restrict_kernel,
    subspace_equal,
    subspace_intersect,
)

log = logging.getLogger(__name__)

__all__ = [
    "JetProvider",
    "DeltaMatrix",
    "OrderReport",
    "SFResult",
    "window_points",
    "delta_matrix",
    "exact_kernel",
    "numeric_kernel",
    "filtration_dims",
    "order_from_dims",
    "strang_fix_order",
    "shift_invariant_space",
    "scale_invariance_flag",
    "largest_affine_subspace",
    "shift_invariance_check",
    "rank_property_check",
    "principal_angles",
]


class JetProvider(Protocol):
    exact: bool
    d: int

    def jet(self, n: Sequence[int], L: int):
        ...


def window_points(d: int, N: int) -> list[tuple]:
    """Non-zero integer points with sup norm at most ``N`` (lexicographic)."""
    return [n for n in product(range(-N, N + 1), repeat=d) if any(n)]


@dataclass
class DeltaMatrix:
    """Stacked ``D_L phi_hat(2 pi n)`` blocks over a window."""

    L: int
    N: int
    exact: bool
    points: list
    blocks: list = field(repr=False)

    def stacked(self):
        if self.exact:
            out = RatMatrix.zeros(0, self.blocks[0].cols)
            for b in self.blocks:
                out = out.vstack(b)
            return out
        return np.vstack(self.blocks)

    def distinct_blocks(self):
        if not self.exact:
            return list(self.blocks)
        seen = {}
        for b in self.blocks:
            seen.setdefault(b, None)
        return list(seen)


def _exact_jets(jp, L, N):
    pts = window_points(jp.d, N)
    jets = {}
    for n in pts:
        S = jp.jet(n, L)
        jets.setdefault(S, []).append(n)
    return pts, jets


def delta_matrix(jp: JetProvider, L: int, N: int) -> DeltaMatrix:
    pts = window_points(jp.d, N)
    if jp.exact:
        cache = {}
        blocks = []
        for n in pts:
            S = jp.jet(n, L)
            if S not in cache:
                cache[S] = bigD_matrix(S, L)
            blocks.append(cache[S])
        return DeltaMatrix(L, N, True, pts, blocks)
    if hasattr(jp, "jets"):
        jets = jp.jets(pts, L)[0]
    else:
        jets = [jp.jet(n, L)[0] for n in pts]
    blocks = [bigD_numeric(v, jp.d, L) for v in jets]
    return DeltaMatrix(L, N, False, pts, blocks)


def exact_kernel(jp: JetProvider, L: int, N: int) -> list[tuple]:
    """Exact real kernel of ``Delta_L`` over the window of radius ``N``."""
    _, jets = _exact_jets(jp, L, N)
    K = None
    # sparse jets (low total degree first) reduce the dimension fastest
    for S in sorted(jets, key=lambda s: (s.low_degree(), len(s.terms))):
        M = bigD_matrix(S, L)
        K = real_kernel_basis(M) if K is None else restrict_kernel(K, M)
        if not K:
            break
    if K is None:
        K = [tuple(Fraction(int(i == j)) for j in range(dim_g(jp.d, L))) for i in range(dim_g(jp.d, L))]
    return canonical_basis(K, dim_g(jp.d, L)) if K else []


def numeric_kernel(jp: JetProvider, L: int, N: int, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal real kernel basis (columns) from an SVD of ``Delta_L``."""
    dm = delta_matrix(jp, L, N)
    rows = []
    for B in dm.blocks:
        s = np.max(np.abs(B))
        if s > 0:
            B = B / s
        rows.append(B.real)
        rows.append(B.imag)
    M = np.vstack(rows)
    _, sv, Vt = np.linalg.svd(M, full_matrices=M.shape[0] < M.shape[1])
    n = M.shape[1]
    smax = sv[0] if sv.size and sv[0] > 0 else 1.0
    full = np.zeros(n)
    full[: sv.size] = sv
    null = full <= tol * smax
    return Vt[null].T.copy()


def filtration_dims(basis, d: int, L: int, exact: bool = True, tol: float = 1e-9) -> list[int]:
    """``dim(V & Pi_{<=l})`` for ``l = 0..L``."""
    gb = graded_basis(d, L)
    if exact:
        n = gb.size
        rev = canonical_basis([tuple(reversed(v)) for v in basis], n)
        lead_deg = []
        for v in rev:
            p = next(i for i, x in enumerate(v) if x)
            lead_deg.append(gb.degree_of(n - 1 - p))
    else:
        B = np.asarray(basis)
        k = B.shape[1] if B.ndim == 2 else 0
        dims = []
        for l in range(L + 1):
            hi = B[dim_g(d, l):, :] if k else np.zeros((0, 0))
            r = 0
            if k and hi.size:
                sv = np.linalg.svd(hi, compute_uv=False)
                r = int(np.sum(sv > tol * max(1.0, sv[0])))
            dims.append(k - r)
        return dims
    return [sum(1 for x in lead_deg if x <= l) for l in range(L + 1)]


@dataclass(frozen=True)
class OrderReport:
    """Both order characterisations from the kernel dimension sequence."""

    dims: tuple
    graded_dims: tuple
    order_max: int | None
    order_graded: int | None

    @property
    def order(self):
        return self.order_max


def order_from_dims(dims: Sequence[int], l_max: int) -> OrderReport:
    """Order by maximal kernel dimension and by the graded characterisation.

    ``dims[l]`` is the kernel dimension at degree ``l``.  The first
    characterisation is the smallest degree reaching the maximal dimension.
    The second is the smallest ``L`` with every graded part ``0..L``
    non-zero and no new element at degree ``L + 1``.
    """
    dims = list(dims)
    graded = [dims[0]] + [dims[l] - dims[l - 1] for l in range(1, len(dims))]
    if dims[0] == 0:
        return OrderReport(tuple(dims), tuple(graded), None, None)
    top = max(dims)
    L1 = dims.index(top)
    if L1 >= l_max:
        raise OrderExceedsBound(f"kernel still growing at degree {l_max}")
    L2 = None
    for l in range(len(dims) - 1):
        if graded[l + 1] == 0:
            L2 = l
            break
    if L2 != L1:
        raise DefinitionMismatch(
            f"order by dimension {L1} differs from graded order {L2} (dims {dims})"
        )
    return OrderReport(tuple(dims), tuple(graded), L1, L2)


def strang_fix_order(jp: JetProvider, l_max: int, N: int = 2, tol: float = 1e-9) -> OrderReport:
    if jp.exact:
        K = exact_kernel(jp, l_max, N)
        dims = filtration_dims(K, jp.d, l_max)
    else:
        K = numeric_kernel(jp, l_max, N, tol)
        dims = filtration_dims(K, jp.d, l_max, exact=False, tol=1e-7)
    return order_from_dims(dims, l_max)


@dataclass
class SFResult:
    """Outcome of the reproduced-space computation."""

    order: int | None
    report: OrderReport
    window: int
    l_max: int
    exact: bool
    space: PolynomialSpace | None
    basis_float: np.ndarray | None = field(default=None, repr=False)
    affine: PolynomialSpace | None = None
    scale_invariant: bool | None = None
    shift_invariant: bool | None = None

    def to_json(self) -> dict:
        out = {
            "order": self.order,
            "dims": list(self.report.dims),
            "graded_dims": list(self.report.graded_dims),
            "window": self.window,
            "l_max": self.l_max,
            "route": "symbolic" if self.exact else "numeric",
            "scale_invariant": self.scale_invariant,
            "shift_invariant": self.shift_invariant,
        }
        if self.space is not None:
            out["space"] = self.space.to_json()
            out["space_text"] = [p.to_str() for p in self.space.basis]
        if self.affine is not None:
            out["affine_subspace"] = self.affine.to_json()
            out["affine_subspace_text"] = [p.to_str() for p in self.affine.basis]
        if self.basis_float is not None:
            out["basis_float"] = self.basis_float.T.tolist()
        return out


def _kernel_at(jp, L, N, tol):
    if jp.exact:
        return exact_kernel(jp, L, N)
    return numeric_kernel(jp, L, N, tol)


def _same(jp, K1, K2, n):
    if jp.exact:
        return subspace_equal(K1, K2, n=n)
    if K1.shape[1] != K2.shape[1]:
        return False
    if K1.shape[1] == 0:
        return True
    return float(np.max(subspace_angles(K1, K2))) < 1e-7


def shift_invariant_space(
    jp: JetProvider,
    l_max: int,
    N: int = 2,
    max_window: int = 32,
    tol: float = 1e-9,
) -> SFResult:
    """Reproduced polynomial space with window doubling until stable."""
    n = dim_g(jp.d, l_max)
    K = _kernel_at(jp, l_max, N, tol)
    while True:
        N2 = 2 * N
        if N2 > max_window:
            raise NoStabilization(f"kernel not stable up to window radius {N}")
        K2 = _kernel_at(jp, l_max, N2, tol)
        if _same(jp, K, K2, n):
            break
        log.info("kernel changed between windows %d and %d", N, N2)
        N, K = N2, K2
    if jp.exact:
        dims = filtration_dims(K, jp.d, l_max)
    else:
        dims = filtration_dims(K, jp.d, l_max, exact=False, tol=1e-7)
    rep = order_from_dims(dims, l_max)
    L = rep.order
    if L is None:
        return SFResult(None, rep, N, l_max, jp.exact, PolynomialSpace(jp.d, ()), None)
    m = dim_g(jp.d, L)
    if jp.exact:
        trunc = [v[:m] for v in K]
        vecs = canonical_basis(trunc, m)
        space = PolynomialSpace.from_vectors(jp.d, vecs)
        si = scale_invariance_flag(space)
        aff = largest_affine_subspace(space)
        shi = shift_invariance_check(space)
        space = PolynomialSpace(jp.d, space.echelon().basis, shi, si)
        return SFResult(L, rep, N, l_max, True, space, None, aff, si, shi)
    Kf = K[:m, :]
    q, _ = np.linalg.qr(Kf)
    q = q[:, : rep.dims[L]]
    return SFResult(L, rep, N, l_max, False, None, q, None, None, None)


def _slices(v: Sequence, d: int, L: int):
    gb = graded_basis(d, L)
    for l in range(L + 1):
        blk = gb.block(l)
        s = [Fraction(0)] * gb.size
        nz = False
        for i in blk:
            s[i] = v[i]
            nz = nz or bool(v[i])
        if nz:
            yield l, tuple(s)


def scale_invariance_flag(space: PolynomialSpace) -> bool:
    """Every homogeneous slice of every basis element lies in the space."""
    L = max(space.max_degree(), 0)
    vecs = space.vectors(L)
    for v in vecs:
        for _, s in _slices(v, space.d, L):
            if not in_span(s, vecs):
                return False
    return True


def largest_affine_subspace(space: PolynomialSpace) -> PolynomialSpace:
    """Largest scale- and shift-invariant subspace: the sum of ``V & Pi_l``."""
    d = space.d
    L = max(space.max_degree(), 0)
    gb = graded_basis(d, L)
    vecs = space.vectors(L)
    out = []
    for l in range(L + 1):
        coord = []
        for i in gb.block(l):
            e = [Fraction(0)] * gb.size
            e[i] = Fraction(1)
            coord.append(tuple(e))
        out.extend(subspace_intersect(vecs, coord) if vecs else [])
    sub = PolynomialSpace.from_vectors(d, out)
    return PolynomialSpace(d, sub.echelon().basis if sub.dim else (), True, True)


def shift_invariance_check(space: PolynomialSpace, trials: int = 3, seed: int = 0) -> bool:
    """Literal test: rational translates of the basis stay in the space."""
    rng = random.Random(seed)
    L = max(space.max_degree(), 0)
    vecs = space.vectors(L)
    for _ in range(trials):
        h = [Fraction(rng.randint(-7, 7), rng.randint(1, 5)) for _ in range(space.d)]
        for p in space.basis:
            if not in_span(p.translate(h).to_vector(L), vecs):
                return False
    return True


@dataclass(frozen=True)
class RankReport:
    rank: int
    expected: int

    @property
    def ok(self) -> bool:
        return self.rank == self.expected


def rank_property_check(S: MultiPoly, l: int, L: int | None = None) -> RankReport:
    """Rank of the block of ``S(-iD)`` with rows of degree ``l`` and columns of degree ``L``.

    Only the degree ``L - l`` part of ``S`` enters the block.  It has full
    row rank ``d(l)`` when that part is non-zero and rank 0 otherwise.
    ``L`` defaults to ``l + deg S``.
    """
    if L is None:
        L = l + S.degree()
    if not 0 <= l <= L:
        raise ValueError("need 0 <= l <= L")
    full = bigD_block(S, l, L)
    cols = list(graded_basis(S.d, L).block(L))
    sub = RatMatrix([[row[c] for c in cols] for row in full.data])
    expected = dim_h(S.d, l) if not S.homogeneous_part(L - l).is_zero() else 0
    return RankReport(rank(sub), expected)


def principal_angles(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Principal angles between the column spans of ``A`` and ``B``."""
    A = np.real_if_close(np.asarray(A))
    B = np.real_if_close(np.asarray(B))
    if A.shape[1] == 0 and B.shape[1] == 0:
        return np.zeros(0)
    if A.shape[1] != B.shape[1]:
        return np.array([np.pi / 2])
    return subspace_angles(A, B)
