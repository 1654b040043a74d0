import random
from fractions import Fraction as F

import pytest

from helpers import (
    NONSTAT_DIAG_SPACE,
    NONSTAT_QUINCUNX_SPACE,
    ONE,
    QUINCUNX_SPACE_L3,
    W_LAPLACE,
    X,
    Y,
    exact_result,
    minor_rank,
    space,
    spec,
)
from ellipsf.errors import DefinitionMismatch, OrderExceedsBound
from ellipsf.multiindex import graded_basis
from ellipsf.polyops import MultiPoly, PolynomialSpace, bigD_block
from ellipsf.ratcore import canonical_basis, subspace_equal
from ellipsf.scalingfn import SymbolicJets
from ellipsf.strangfix import (
    delta_matrix,
    exact_kernel,
    largest_affine_subspace,
    order_from_dims,
    rank_property_check,
    scale_invariance_flag,
    shift_invariance_check,
    shift_invariant_space,
    window_points,
)


class ConstantJets:
    """Jet provider of a function that does not vanish at any lattice point."""

    exact = True
    d = 2

    def jet(self, n, L):
        return MultiPoly.const(2, 1) + X * F(n[0], 7)


def test_window_points():
    pts = window_points(2, 2)
    assert len(pts) == 24 and (0, 0) not in pts


def test_quincunx_kernel_at_degree_three():
    K = exact_kernel(SymbolicJets(spec("quincunx")), 3, 2)
    assert len(K) == 7
    assert PolynomialSpace.from_vectors(2, K).same_span(QUINCUNX_SPACE_L3)


def test_nonstationary_quincunx_matrix_rows():
    D = delta_matrix(SymbolicJets(spec("nonstat_quincunx")), 2, 2).stacked()
    rows = canonical_basis(D.real_part().vstack(D.imag_part()).data, 6)
    displayed = [(0, 2, 0, -2, 0, -2), (0, 0, 0, 4, 0, 0), (0, 0, 0, 0, 2, 0)]
    assert subspace_equal(rows, displayed, n=6)
    K = exact_kernel(SymbolicJets(spec("nonstat_quincunx")), 2, 2)
    assert PolynomialSpace.from_vectors(2, K).same_span(NONSTAT_QUINCUNX_SPACE)


def test_nowhere_vanishing_gives_empty_kernel():
    assert exact_kernel(ConstantJets(), 3, 2) == []
    res = shift_invariant_space(ConstantJets(), 4)
    assert res.order is None and res.space.dim == 0


def test_order_from_dims():
    assert order_from_dims([1, 3, 5, 7, 7, 7], 5).order == 3
    assert order_from_dims([0, 0, 0], 2).order is None
    with pytest.raises(OrderExceedsBound):
        order_from_dims([1, 3, 5], 2)
    with pytest.raises(DefinitionMismatch):
        order_from_dims([1, 1, 3, 3, 3], 4)


# Orders and dimensions confirmed by the symbolic route, the numeric route and cascades.
FROZEN = {
    "quincunx": (4, 8),
    "second": (3, 7),
    "diag": (4, 8),
    "higher6": (8, 16),
    "higher8": (8, 16),
    "nonstat_quincunx": (3, 4),
    "nonstat_diag": (4, 8),
    "sum_of_powers": (8, 16),
    "quincunx_m2": (8, 24),
}


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_frozen_orders(name):
    res = exact_result(name)
    assert (res.order, res.space.dim) == FROZEN[name]
    assert res.shift_invariant


def test_spaces_contain_degree_three_kernels():
    assert exact_result("quincunx").space.same_span(space(*QUINCUNX_SPACE_L3.basis, X**3 * Y - X * Y**3))
    nsd = exact_result("nonstat_diag").space
    assert all(nsd.contains(p) for p in NONSTAT_DIAG_SPACE.basis)
    assert all(exact_result("nonstat_quincunx").space.contains(p) for p in NONSTAT_QUINCUNX_SPACE.basis)


def test_scale_invariance_flags():
    assert exact_result("quincunx").scale_invariant is True
    assert exact_result("sum_of_powers").scale_invariant is True
    assert exact_result("nonstat_quincunx").scale_invariant is False
    assert exact_result("nonstat_diag").scale_invariant is False
    assert scale_invariance_flag(NONSTAT_QUINCUNX_SPACE) is False
    assert scale_invariance_flag(QUINCUNX_SPACE_L3) is True


def test_affine_subspace():
    assert largest_affine_subspace(QUINCUNX_SPACE_L3).same_span(QUINCUNX_SPACE_L3)
    assert largest_affine_subspace(NONSTAT_QUINCUNX_SPACE).same_span(space(ONE, Y))
    # the difference of the two cubic generators minus 3(x^2-y^2) is a pure cubic
    cubic = X**3 + 3 * X * X * Y - 3 * X * Y * Y - Y**3
    expected = space(ONE, X, Y, X * X - Y * Y, X * Y, cubic)
    assert largest_affine_subspace(NONSTAT_DIAG_SPACE).same_span(expected)
    assert exact_result("nonstat_diag").affine.same_span(expected)


def test_shift_invariance_literal():
    assert shift_invariance_check(NONSTAT_QUINCUNX_SPACE)
    assert not shift_invariance_check(space(ONE, X * X))


def test_rank_property_examples():
    rep = rank_property_check(W_LAPLACE, 1, 3)
    assert rep.rank == 2 == rep.expected
    assert rank_property_check(X**3 + Y**4, 0, 2).rank == 0


def test_rank_matches_minor_oracle():
    rng = random.Random(4)
    for _ in range(10):
        S = MultiPoly(2, {a: F(rng.randint(-3, 3)) for a in ((2, 0), (1, 1), (0, 2))})
        for l in range(3):
            blk = bigD_block(S, l, l + 2)
            cols = list(graded_basis(2, l + 2).block(l + 2))
            rows = [[r[c] for c in cols] for r in blk.data]
            rep = rank_property_check(S, l)
            assert rep.rank == minor_rank(rows)
            assert rep.ok
