import numpy as np
import pytest

from helpers import ONE, W_LAPLACE, X, Y, exact_result, spec
from ellipsf.errors import Divergence
from ellipsf.multiindex import graded_basis
from ellipsf.polyops import MultiPoly
from ellipsf.ratcore import I
from ellipsf.scalingfn import (
    NumericJets,
    SymbolicJets,
    cascade_eval,
    fill_box,
    jet_agreement,
    refinement_residual,
    subdivision_coefficients,
    verify_annihilation,
    verify_reproduction,
)
from ellipsf.strangfix import window_points

GB3 = graded_basis(2, 3)


@pytest.fixture(scope="module")
def quincunx_grid():
    return cascade_eval(spec("quincunx"), 8)


def test_quincunx_jet_at_first_lattice_point():
    v, err = NumericJets(spec("quincunx"), 30).jet((1, 0), 3)
    assert np.max(np.abs(v[:3])) < 1e-12
    quad = v[list(GB3.block(2))]
    assert abs(quad[1]) < 1e-12 and abs(quad[0] - quad[2]) < 1e-12 and abs(quad[0]) > 1e-3
    assert err < 1e-6


def test_tail_estimate_flags_short_products():
    s = spec("quincunx")
    short = NumericJets(s, 2).jet((40, 0), 2)[1]
    long = NumericJets(s, 30).jet((40, 0), 2)[1]
    assert short > 1e-2 and long < 1e-4


def test_vanishes_on_lattice():
    vals, _ = NumericJets(spec("quincunx"), 30).jets(window_points(2, 3), 0)
    assert np.max(np.abs(vals)) < 1e-12


def test_symbolic_leading_terms():
    F1 = SymbolicJets(spec("quincunx")).jet((1, 0), 3)
    assert F1.low_degree() == 2 and F1.homogeneous_part(2) == W_LAPLACE * F1.coeff((2, 0))
    F2 = SymbolicJets(spec("quincunx_m2")).jet((1, 0), 5)
    assert F2.low_degree() == 4 and F2.homogeneous_part(4) == (W_LAPLACE * W_LAPLACE) * F2.coeff((4, 0))
    F3 = SymbolicJets(spec("nonstat_quincunx")).jet((1, 0), 2)
    target = MultiPoly(2, {(1, 0): 2 * I}) + W_LAPLACE
    assert F3 == target * F3.coeff((2, 0))


@pytest.mark.parametrize("name,n", [
    ("quincunx", (1, 0)), ("second", (1, 1)), ("diag", (2, 1)),
    ("nonstat_quincunx", (1, 2)), ("nonstat_diag", (2, 1)), ("higher8", (0, 1)),
])
def test_jet_agreement(name, n):
    assert jet_agreement(spec(name), n, 4) < 1e-12


def test_subdivision_coefficients_sum():
    for name in ("quincunx", "second", "diag"):
        a = subdivision_coefficients(spec(name).m0, 2 if name != "diag" else 4)
        assert abs(sum(a.values()) - (2 if name != "diag" else 4)) < 1e-14


def test_partition_and_refinement(quincunx_grid):
    assert quincunx_grid.partition_error() < 1e-6
    assert refinement_residual(quincunx_grid, spec("quincunx")) < 1e-6
    assert abs(quincunx_grid.mass() - 1) < 1e-12


def test_support_bound(quincunx_grid):
    nz = np.abs(quincunx_grid.values) > 0
    radius = np.max(np.linalg.norm(quincunx_grid.points[nz], axis=1))
    # mask frequencies have norm <= sqrt 2 and A^{-1} contracts by 1/sqrt 2
    assert radius <= np.sqrt(2) / (np.sqrt(2) - 1)


def test_second_matrix_refinement_improves():
    s = spec("second")
    r4 = refinement_residual(cascade_eval(s, 4), s)
    r8 = refinement_residual(cascade_eval(s, 8), s)
    assert r8 < r4 < 0.05


def test_fill_box_is_complete(quincunx_grid):
    box = fill_box(quincunx_grid, (-6, 6))
    assert np.all(np.abs(box.points) <= 6 + 1e-12)
    assert abs(box.values.sum() - quincunx_grid.values.sum()) < 1e-9


def test_reproduction(quincunx_grid):
    assert verify_reproduction(quincunx_grid, X * Y).residual < 1e-3
    assert verify_reproduction(quincunx_grid, X * X - Y * Y).residual < 1e-3
    assert verify_reproduction(quincunx_grid, ONE).residual < 1e-6
    assert verify_reproduction(quincunx_grid, X * X).residual > 1e-2


def test_annihilation():
    s = spec("quincunx")
    assert verify_annihilation(s, exact_result("quincunx").space) < 1e-8
    assert verify_annihilation(s, [ONE]) < 1e-12
    jets, _ = NumericJets(s, 30).jets(window_points(2, 2), 2)
    c = jets[:, graded_basis(2, 2).position[(0, 2)]]
    assert abs(verify_annihilation(s, [X * X]) - np.max(np.abs(2 * c))) < 1e-12
    assert verify_annihilation(s, [X * X]) > 1e-3


def test_nonstationary_cascade_rejected():
    with pytest.raises(ValueError):
        cascade_eval(spec("nonstat_quincunx"), 3)


def test_diverging_cascade_detected():
    from ellipsf.masks import MaskSpec, TrigPoly

    s = spec("quincunx")
    # m0(0) = 1 but m0(pi, 0) = 3, so the cascade grows without bound
    bad = TrigPoly.const(2, 2) - TrigPoly.cos(2, 0)
    with pytest.raises(Divergence):
        cascade_eval(MaskSpec(s.A, s.G, bad), 12)
