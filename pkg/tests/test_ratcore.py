import random
from fractions import Fraction as F
from itertools import product

from helpers import minor_rank
from ellipsf.ratcore import (
    GaussQ,
    I,
    RatMatrix,
    canonical_basis,
    in_span,
    kernel_basis,
    rank,
    real_kernel_basis,
    rref,
    subspace_equal,
    subspace_intersect,
)
from ellipsf.polyops import bigD_matrix
from helpers import W_LAPLACE


def rand_matrix(rng, m, n, zero_rate=0.3):
    return [[F(0) if rng.random() < zero_rate else F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)] for _ in range(m)]


def test_rref_identity():
    R, piv = rref(RatMatrix.identity(2))
    assert R == RatMatrix.identity(2) and piv == (0, 1)


def test_rref_single_row():
    R, piv = rref(RatMatrix([[2, 0, 2]]))
    assert R == RatMatrix([[1, 0, 1]]) and piv == (0,)


def test_rank_matches_minor_oracle():
    rng = random.Random(7)
    for _ in range(10):
        rows = rand_matrix(rng, 4, 6)
        rows[3] = [a + 2 * b for a, b in zip(rows[0], rows[1])] if rng.random() < 0.5 else rows[3]
        assert rank(RatMatrix(rows)) == minor_rank(rows)


def test_kernel_of_row():
    K = kernel_basis(RatMatrix([[2, 0, 2]]))
    assert subspace_equal(K, [(1, 0, -1), (0, 1, 0)])
    assert kernel_basis(RatMatrix.identity(3)) == []


def test_kernel_grid_oracle():
    rng = random.Random(3)
    grid = [F(k) for k in range(-2, 3)]
    for _ in range(5):
        rows = [[F(rng.randint(-1, 1)) for _ in range(5)] for _ in range(3)]
        M = RatMatrix(rows)
        K = kernel_basis(M)
        for v in K:
            assert all(x == 0 for x in M @ v)
        assert len(K) == 5 - rank(M)
        for v in product(grid, repeat=5):
            assert all(x == 0 for x in M @ v) == in_span(v, K)


def test_real_kernel_of_gaussian_matrix():
    M = RatMatrix([[1, I, 0]])
    K = real_kernel_basis(M)
    assert subspace_equal(K, [(0, 0, 1)])


def test_subspace_equal_examples():
    assert subspace_equal([(1, 0)], [(2, 0)])
    assert subspace_equal([(1, 0), (0, 1)], [(1, 1), (1, -1)])
    assert not subspace_equal([(1, 0)], [(0, 1)])


def test_harmonic_cubics_from_block():
    # kernel of W(-iD) restricted to cubic polynomials (graded L=3 positions 6..9)
    K = [v for v in kernel_basis(bigD_matrix(W_LAPLACE, 3))]
    cubic = [v for v in K if any(v[6:]) and not any(v[:6])]
    # x^3 - 3xy^2 and y^3 - 3x^2y in the layer order x^3, x^2y, xy^2, y^3
    z = (F(0),) * 6
    target = [z + (1, 0, -3, 0), z + (0, -3, 0, 1)]
    assert subspace_equal(cubic, target, n=10)


def test_subspace_intersect_examples():
    B = [(1, 0, 0), (0, 1, 0)]
    assert subspace_equal(subspace_intersect(B, B), canonical_basis(B))
    assert subspace_intersect([(1, 0)], [(0, 1)]) == []


def test_nested_kernels():
    n = 15
    K1 = kernel_basis(bigD_matrix(W_LAPLACE, 4))
    K2 = kernel_basis(bigD_matrix(W_LAPLACE * W_LAPLACE, 4))
    assert subspace_equal(subspace_intersect(K1, K2), K1, n=n)


def test_gaussian_arithmetic():
    z = GaussQ(F(1, 2), F(-3))
    assert z * z.conjugate() == F(37, 4)
    assert (z / z) == 1 and I * I == -1
