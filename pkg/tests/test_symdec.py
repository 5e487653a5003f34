import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_symmetric
from miqpa.rational import Matrix, det, frobenius_sq, inverse, matmul, rank
from miqpa.symdec import NotSymmetricError, ldl_decompose, symmetric_decompose


def test_zero_matrix():
    sd = symmetric_decompose(Matrix.zero(3, 3))
    assert sd.B == Matrix.identity(3) and sd.D.is_zero()
    ldl = ldl_decompose(Matrix.zero(3, 3))
    assert ldl.L == Matrix.identity(3) and ldl.D.is_zero()


def test_already_diagonal():
    sd = symmetric_decompose(Matrix.diag([4, 1]))
    assert sd.B == Matrix.identity(2) and sd.D == Matrix.diag([4, 1])


def test_off_diagonal_pair():
    H = Matrix([[0, 1], [1, 0]])
    sd = symmetric_decompose(H)
    assert sd.B == Matrix([[1, 1], [mpq(-1, 2), mpq(1, 2)]])
    assert sd.D == Matrix.diag([2, mpq(-1, 2)])
    assert matmul(matmul(sd.B, H), sd.B.T) == sd.D
    ldl = ldl_decompose(H)
    assert ldl.L == Matrix([[mpq(1, 2), -1], [mpq(1, 2), 1]])
    assert ldl.D == Matrix.diag([2, mpq(-1, 2)])


def test_rejects_asymmetric():
    with pytest.raises(NotSymmetricError):
        symmetric_decompose(Matrix([[0, 1], [0, 0]]))


def test_ldl_random_6x6():
    rng = random.Random(6)
    for _ in range(5):
        H = random_symmetric(rng, 6)
        ldl = ldl_decompose(H)
        assert matmul(matmul(ldl.L, ldl.D), ldl.L.T) == H


@st.composite
def symmetric(draw):
    n = draw(st.integers(1, 6))
    vals = draw(st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=9),
                         min_size=n * n, max_size=n * n))
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = vals[i * n + j]
    if draw(st.booleans()):  # force low rank sometimes
        u = vals[:n]
        rows = [[a * b for b in u] for a in u]
    return Matrix(rows, ncols=n)


@settings(max_examples=80, deadline=None)
@given(symmetric())
def test_decomposition_properties(H):
    n = H.nrows
    sd = symmetric_decompose(H)
    assert sd.D.is_diagonal()
    assert matmul(matmul(sd.B, H), sd.B.T) == sd.D
    assert rank(sd.D) == rank(H)
    assert det(sd.B) != 0
    bound = (5 * n) ** n
    assert frobenius_sq(sd.B) <= bound
    assert frobenius_sq(inverse(sd.B)) <= bound


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=10, max_size=10))
def test_determinant_ratio_law(vals):
    it = iter(vals)
    rows = [[0] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(i, 4):
            rows[i][j] = rows[j][i] = next(it)
    H = Matrix(rows)
    sd = symmetric_decompose(H, record=True)
    for k, (Hk, Pk) in enumerate(sd.history, 1):
        G = matmul(matmul(Pk, H), Pk.T)
        lead = list(range(k))
        dk = det(G.select_rows(lead).select_cols(lead))
        if dk == 0:
            assert Hk.select_rows(range(k, 4)).select_cols(range(k, 4)).is_zero()
            continue
        for i in range(k, 4):
            for j in range(k, 4):
                assert Hk[i, j] == det(G.select_rows(lead + [i]).select_cols(lead + [j])) / dk
