"""Property-based checks of algebraic invariants."""

from fractions import Fraction as F

from hypothesis import given, settings
from hypothesis import strategies as st

from ellipsf.masks import build_mask, maclaurin_jet, sin_form, substitute_sin_monomials
from ellipsf.multiindex import dim_g, graded_basis
from ellipsf.polyops import MultiPoly, bigD_matrix, diff_apply, pascal_matrix, translate
from ellipsf.ratcore import RatMatrix, kernel_basis, rank
from ellipsf.strangfix import rank_property_check
from helpers import minor_rank, spec

rats = st.fractions(min_value=-5, max_value=5, max_denominator=6)
small = st.integers(-3, 3).map(F)


@st.composite
def matrices(draw, max_rows=4, max_cols=5):
    m = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    return [[draw(small) for _ in range(n)] for _ in range(m)]


@st.composite
def polys(draw, d=2, L=3):
    idx = graded_basis(d, L).indices
    return MultiPoly(d, {a: draw(small) for a in idx if draw(st.booleans())})


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity(rows):
    M = RatMatrix(rows)
    K = kernel_basis(M)
    assert rank(M) + len(K) == M.cols
    assert all(x == 0 for v in K for x in M @ v)


@settings(max_examples=30, deadline=None)
@given(matrices(max_rows=3, max_cols=4))
def test_rank_equals_minor_rank(rows):
    assert rank(RatMatrix(rows)) == minor_rank(rows)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3), st.integers(0, 4), st.data())
def test_translation_identity(d, L, data):
    x = [data.draw(rats) for _ in range(d)]
    y = [data.draw(rats) for _ in range(d)]
    idx = graded_basis(d, L).indices

    def row(p):
        out = []
        for a in idx:
            v = F(1)
            for pi, ai in zip(p, a):
                v *= pi**ai
            out.append(v)
        return RatMatrix([out])

    assert row([a + b for a, b in zip(x, y)]) == row(x) @ pascal_matrix(y, d, L)


@settings(max_examples=50, deadline=None)
@given(st.lists(rats, min_size=2, max_size=2), st.lists(rats, min_size=2, max_size=2))
def test_pascal_multiplicative(x, y):
    L = 3
    assert pascal_matrix(x, 2, L) @ pascal_matrix(y, 2, L) == pascal_matrix([a + b for a, b in zip(x, y)], 2, L)


@settings(max_examples=50, deadline=None)
@given(polys(), st.lists(rats, min_size=2, max_size=2))
def test_translation_commutes_with_operators(P, h):
    S = MultiPoly(2, {(2, 0): 1, (0, 2): 1, (1, 0): 3})
    assert translate(diff_apply(S, P), h) == diff_apply(S, translate(P, h))


@settings(max_examples=50, deadline=None)
@given(polys(L=2), st.integers(0, 3), st.integers(0, 3))
def test_rank_property(S, l, extra):
    rep = rank_property_check(S, l, l + extra)
    assert rep.ok


@settings(max_examples=40, deadline=None)
@given(polys(L=4))
def test_bigD_matrix_matches_diff_apply(S):
    L = 4
    M = bigD_matrix(S, L)
    P = MultiPoly(2, {(2, 1): 1, (0, 3): -2, (1, 0): 5})
    v = RatMatrix([[c] for c in P.to_vector(L)])
    # rows of bigD act on coefficients; compare with the coefficient vector of S(-iD)P
    got = tuple(r[0] for r in (M @ v).data)
    assert got == diff_apply(S, P).to_vector(L)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["quincunx", "second", "diag", "higher6"]),
       st.fractions(min_value=F(1, 10), max_value=10, max_denominator=12))
def test_mask_invariant_under_G_scaling(name, lam):
    s = spec(name)
    assert build_mask(s.G * lam, s.A) == s.m0


@settings(max_examples=40, deadline=None)
@given(polys(L=4))
def test_sin_form_inverts_substitution(P):
    T = substitute_sin_monomials(P)
    assert sin_form(T) == P
    if not P.is_zero():
        low = P.low_degree()
        assert maclaurin_jet(T, low).homogeneous_part(low) == P.homogeneous_part(low)


@settings(max_examples=30, deadline=None)
@given(st.lists(small, min_size=3, max_size=3).filter(lambda c: c[0] > 0 and c[2] > 0 and 4 * c[0] * c[2] > c[1] ** 2))
def test_G_from_random_forms(c):
    from ellipsf.masks import build_G

    a, b, cc = c
    Q2 = RatMatrix([[a, b / 2], [b / 2, cc]])
    G = build_G(Q2)
    assert maclaurin_jet(G, 3) == MultiPoly(2, {(2, 0): a, (1, 1): b, (0, 2): cc})
    assert G.value_at_zero() == 0 and G.is_periodic()


def test_dims_formula():
    from math import comb

    assert all(dim_g(d, L) == comb(d + L, d) for d in range(1, 4) for L in range(6))
