import random
from fractions import Fraction
from itertools import permutations

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from miqpa.rational import (
    DimensionError,
    Matrix,
    SingularMatrixError,
    ceil,
    ceil_sqrt_int,
    det,
    floor,
    fmt,
    frobenius_sq,
    inverse,
    kernel_basis,
    left_inverse,
    matmul,
    orth_complement_basis,
    rank,
    rat,
    round_half_even,
    solve,
    sqrt_upper,
)

small = st.fractions(min_value=-9, max_value=9, max_denominator=9)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def triple_loop(A, B):
    return [[sum((A[i][t] * B[t][j] for t in range(len(B))), Fraction(0)) for j in range(len(B[0]))]
            for i in range(len(A))]


def cofactor_det(A):
    n = len(A)
    if n == 0:
        return Fraction(1)
    return sum((-1) ** j * A[0][j] * cofactor_det([row[:j] + row[j + 1:] for row in A[1:]]) for j in range(n))


def leibniz_det(A):
    n = len(A)
    total = Fraction(0)
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = Fraction(sign)
        for i in range(n):
            term *= A[i][perm[i]]
        total += term
    return total


def elimination_rank(rows):
    rows = [list(r) for r in rows]
    r = 0
    for c in range(len(rows[0]) if rows else 0):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def test_rat_parsing():
    assert rat("6/8") == mpq(3, 4)
    assert rat(" -2 ") == -2
    assert rat(Fraction(1, 3)) == mpq(1, 3)
    with pytest.raises(TypeError):
        rat(0.5)
    with pytest.raises(ValueError):
        rat("1.5")
    with pytest.raises(ZeroDivisionError):
        rat("1/0")
    assert fmt(mpq(-6, 4)) == "-3/2"
    assert fmt(mpq(4, 2)) == "2"


def test_rounding_helpers():
    assert floor(mpq(-1, 2)) == -1 and ceil(mpq(-1, 2)) == 0
    assert [round_half_even(mpq(v, 2)) for v in (-3, -1, 1, 3, 5)] == [-2, 0, 0, 2, 2]
    assert ceil_sqrt_int(125) == 12 and ceil_sqrt_int(144) == 12
    s = sqrt_upper(mpq(2))
    assert s * s >= 2 and (s - mpq(1, 2 ** 20)) ** 2 < 2
    assert sqrt_upper(mpq(9, 4)) == mpq(3, 2)


def test_matmul_examples():
    M = Matrix([[1, 2], [3, 4]])
    assert matmul(Matrix.identity(2), M) == M
    B = Matrix([[1, 1], [mpq(-1, 2), mpq(1, 2)]])
    assert matmul(B, Matrix([[0, 1], [1, 0]])) == Matrix([[1, 1], [mpq(1, 2), mpq(-1, 2)]])
    with pytest.raises(DimensionError):
        matmul(Matrix([[1, 2]]), Matrix([[1, 2]]))


@settings(max_examples=40, deadline=None)
@given(square(4), square(4))
def test_matmul_matches_triple_loop(A, B):
    got = matmul(Matrix(A), Matrix(B))
    assert [[Fraction(int(v.numerator), int(v.denominator)) for v in row] for row in got.rows] == triple_loop(A, B)


def test_det_examples():
    assert det(Matrix.identity(3)) == 1
    assert det(Matrix([[0, 1], [1, 0]])) == -1
    with pytest.raises(DimensionError):
        det(Matrix([[1, 2]]))


def test_det_random_5x5_against_cofactor():
    rng = random.Random(5)
    for _ in range(10):
        A = [[Fraction(rng.randint(-9, 9)) for _ in range(5)] for _ in range(5)]
        assert det(Matrix(A)) == cofactor_det(A)


@settings(max_examples=40, deadline=None)
@given(square(4))
def test_det_matches_leibniz(A):
    assert det(Matrix(A)) == leibniz_det(A)


def test_frobenius_examples():
    assert frobenius_sq(Matrix.zero(3, 3)) == 0
    assert frobenius_sq(Matrix.identity(4)) == 4
    assert frobenius_sq(Matrix([[1, 1], [mpq(-1, 2), mpq(1, 2)]])) == mpq(5, 2)


def test_left_inverse_examples():
    assert left_inverse(Matrix.identity(2)) == Matrix.identity(2)
    assert left_inverse(Matrix([[1], [1]])) == Matrix([[mpq(1, 2), mpq(1, 2)]])
    rng = random.Random(7)
    for _ in range(10):
        while True:
            B = Matrix([[rng.randint(-5, 5) for _ in range(2)] for _ in range(4)])
            if rank(B) == 2:
                break
        assert matmul(left_inverse(B), B) == Matrix.identity(2)


def test_inverse_kernel_rank():
    assert inverse(Matrix.identity(3)) == Matrix.identity(3)
    with pytest.raises(SingularMatrixError):
        inverse(Matrix([[1, 2], [2, 4]]))
    K = kernel_basis(Matrix([[1, 1, 1]]))
    assert K.ncols == 2 and rank(K) == 2
    assert all(sum(c) == 0 for c in K.columns())
    rng = random.Random(3)
    for _ in range(10):
        A = Matrix([[rng.randint(-4, 4) for _ in range(2)] for _ in range(5)])
        B = Matrix([[rng.randint(-4, 4) for _ in range(5)] for _ in range(2)])
        AB = matmul(A, B)
        assert rank(AB) == elimination_rank([[Fraction(int(v.numerator), int(v.denominator)) for v in r]
                                             for r in AB.rows]) <= 2


@settings(max_examples=40, deadline=None)
@given(square(3), st.lists(small, min_size=3, max_size=3))
def test_solve_and_inverse_agree(A, b):
    M = Matrix(A)
    if det(M) == 0:
        with pytest.raises(SingularMatrixError):
            solve(M, b)
        return
    x = solve(M, b)
    assert M.apply(x) == tuple(mpq(v) for v in b)
    assert matmul(M, inverse(M)) == Matrix.identity(3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=3))
def test_kernel_and_complement(rows):
    A = Matrix(rows)
    K = kernel_basis(A)
    assert K.ncols == 4 - rank(A)
    assert all(not any(A.apply(c)) for c in K.columns())
    if K.ncols:
        C = orth_complement_basis(K)
        assert C.ncols == rank(A)
        assert matmul(K.T, C).is_zero()
