import random
from fractions import Fraction as F

from helpers import ONE, W_LAPLACE, X, Y, space
from ellipsf.multiindex import graded_basis
from ellipsf.polyops import (
    MultiPoly,
    bigD_block,
    bigD_matrix,
    diff_apply,
    kernel_polynomials,
    pascal_matrix,
    translate,
)
from ellipsf.ratcore import I, RatMatrix, rank

W_SECOND = MultiPoly(2, {(2, 0): 2, (1, 1): 1, (0, 2): 1})


def top_columns(M, d, L):
    cols = list(graded_basis(d, L).block(L))
    return RatMatrix([[row[c] for c in cols] for row in M.data])


def test_diff_apply_examples():
    assert diff_apply(W_LAPLACE, X * X - Y * Y).is_zero()
    assert diff_apply(W_LAPLACE, X * X) == MultiPoly.const(2, -2)
    assert diff_apply(W_SECOND, X * X - 4 * X * Y).is_zero()


def test_pascal_examples():
    assert pascal_matrix((0, 0), 2, 3) == RatMatrix.identity(10)
    assert pascal_matrix((1, 1), 2, 1) == RatMatrix([[1, 1, 1], [0, 1, 0], [0, 0, 1]])


def test_translation_identity_examples():
    rng = random.Random(1)
    for _ in range(20):
        L = rng.randint(0, 4)
        x = [F(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(2)]
        y = [F(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(2)]
        idx = graded_basis(2, L).indices
        row = lambda p: RatMatrix([[p[0] ** a[0] * p[1] ** a[1] for a in idx]])
        assert row([a + b for a, b in zip(x, y)]) == row(x) @ pascal_matrix(y, 2, L)


def test_blocks_of_laplacian():
    assert top_columns(bigD_block(W_LAPLACE, 0, 2), 2, 2) == RatMatrix([[-2, 0, -2]])
    assert top_columns(bigD_block(W_LAPLACE, 1, 3), 2, 3) == RatMatrix([[-6, 0, -2, 0], [0, -2, 0, -6]])
    assert rank(top_columns(bigD_block(W_LAPLACE, 1, 3), 2, 3)) == 2
    # W has no constant or linear terms: only the blocks above are non-zero
    M = bigD_matrix(W_LAPLACE, 3)
    nz = {(i, j) for i in range(10) for j in range(10) if M[i, j] != 0}
    gb = graded_basis(2, 3)
    assert {(gb.degree_of(i), gb.degree_of(j)) for i, j in nz} == {(0, 2), (1, 3)}


def test_constant_symbol():
    M = bigD_matrix(MultiPoly.const(2, 3), 3)
    assert M == RatMatrix.identity(10).scale(3)
    assert kernel_polynomials(MultiPoly.const(2, 3), 3).dim == 0


def test_diagonal_block_is_constant_term():
    S = MultiPoly(2, {(0, 0): F(5, 7), (1, 0): I, (0, 2): 1})
    for L in range(4):
        blk = bigD_block(S, L, L)
        cols = list(graded_basis(2, L).block(L))
        assert RatMatrix([[r[c] for c in cols] for r in blk.data]) == RatMatrix.identity(len(cols)).scale(F(5, 7))


def test_high_order_jet_gives_zero_block():
    S = X**3 + Y**4
    assert all(x == 0 for r in bigD_block(S, 0, 2).data for x in r)


def test_kernel_laplacian():
    K = kernel_polynomials(W_LAPLACE, 3)
    target = space(ONE, X, Y, X * X - Y * Y, X * Y, X**3 - 3 * X * Y * Y, Y**3 - 3 * X * X * Y)
    assert K.same_span(target)


def test_kernel_second_form():
    K = kernel_polynomials(W_SECOND, 3)
    target = space(
        ONE, X, Y, X * X - 4 * X * Y, Y * Y - 2 * X * Y,
        X**3 + 6 * X * X * Y - 12 * X * Y * Y, Y**3 - 3 * X * X * Y + 3 * X * Y * Y,
    )
    assert K.same_span(target)


def test_kernel_cubic_symbol():
    S = W_LAPLACE + MultiPoly(2, {(3, 0): I, (0, 3): I})
    K = kernel_polynomials(S, 3)
    target = space(
        ONE, X, Y, X * X - Y * Y, X * Y,
        3 * X * X - X**3 + 3 * X * Y * Y, 3 * Y * Y - Y**3 + 3 * X * X * Y,
    )
    assert K.same_span(target)


def test_kernel_first_order_symbol():
    S = MultiPoly(2, {(1, 0): 2 * I, (2, 0): 1, (0, 2): 1})
    assert kernel_polynomials(S, 2).same_span(space(ONE, Y, X + Y * Y))


def test_translate_examples():
    assert translate(X * X, (1, 0)) == X * X + 2 * X + 1
    P = X**3 - 2 * X * Y + 5
    assert translate(P, (0, 0)) == P


def test_translate_matches_pascal_action():
    rng = random.Random(5)
    for _ in range(20):
        L = 3
        P = MultiPoly(2, {a: F(rng.randint(-4, 4)) for a in graded_basis(2, L).indices if rng.random() < 0.5})
        h = [F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(2)]
        v = RatMatrix([[c] for c in P.to_vector(L)])
        via_pascal = pascal_matrix(h, 2, L) @ v
        assert tuple(r[0] for r in via_pascal.data) == translate(P, h).to_vector(L)
