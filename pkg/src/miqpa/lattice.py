"""Rational lattices of rank ``p`` in ``R^d``.

Includes Gram-Schmidt data, LLL reduction (parameter 3/4) with a unimodular
certificate, and the "lattice point in a ball, or a flat direction"
dichotomy used to decide how to branch.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from gmpy2 import mpq

from .rational import (
    ZERO,
    Matrix,
    Rat,
    Vector,
    det,
    dot,
    inverse,
    is_integral,
    left_inverse,
    matmul,
    norm_sq,
    projector,
    rank,
    round_half_even,
    vadd,
    vec,
    vsub,
)

LOVASZ = mpq(3, 4)


class DependentColumnsError(ValueError):
    pass


class RankDropError(DependentColumnsError):
    pass


def _gso_from_gram(G: Sequence[Sequence]) -> tuple[list[list], list]:
    """Gram-Schmidt coefficients ``mu`` and squared norms from a Gram matrix."""
    p = len(G)
    mu = [[ZERO] * p for _ in range(p)]
    bn = [ZERO] * p
    r = [[ZERO] * p for _ in range(p)]
    for i in range(p):
        for j in range(i):
            r[i][j] = G[i][j] - sum((mu[j][l] * r[i][l] for l in range(j)), ZERO)
            mu[i][j] = r[i][j] / bn[j]
        bn[i] = G[i][i] - sum((mu[i][j] * r[i][j] for j in range(i)), ZERO)
        if bn[i] == 0:
            raise DependentColumnsError("basis columns are linearly dependent")
        mu[i][i] = mpq(1)
    return mu, bn


@dataclass(frozen=True)
class LatticeBasis:
    """Basis matrix ``B`` (``d x p``) with independent columns."""

    B: Matrix
    g: tuple[Vector, ...] = field(init=False, repr=False, compare=False)
    mu: tuple[Vector, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cols = self.B.columns()
        g: list[Vector] = []
        mu = [[ZERO] * len(cols) for _ in cols]
        for i, b in enumerate(cols):
            gi = b
            for j in range(i):
                mu[i][j] = dot(b, g[j]) / norm_sq(g[j])
                gi = vsub(gi, tuple(mu[i][j] * t for t in g[j]))
            if norm_sq(gi) == 0:
                raise DependentColumnsError("basis columns are linearly dependent")
            mu[i][i] = mpq(1)
            g.append(gi)
        object.__setattr__(self, "g", tuple(g))
        object.__setattr__(self, "mu", tuple(tuple(r) for r in mu))

    @property
    def d(self) -> int:
        return self.B.nrows

    @property
    def p(self) -> int:
        return self.B.ncols

    def columns(self) -> list[Vector]:
        return self.B.columns()

    def det_sq(self) -> Rat:
        """``det(B^T B)``, the squared lattice determinant."""
        return det(matmul(self.B.T, self.B))

    def coordinates(self, y: Sequence) -> Vector:
        """``B^+ y``; integral exactly when ``y`` lies in the lattice plus its orthogonal complement."""
        if self.p == 0:
            return ()
        return left_inverse(self.B).apply(y)

    def contains_coset(self, y: Sequence) -> bool:
        return all(is_integral(t) for t in self.coordinates(y))

    def scaled(self, c) -> "LatticeBasis":
        return LatticeBasis(self.B.scale(c))


def gram_schmidt(L: LatticeBasis) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
    return L.g, L.mu


@dataclass(frozen=True)
class LllResult:
    basis: LatticeBasis
    transform: Matrix  # unimodular T with reduced = B @ T


def is_lll_reduced(L: LatticeBasis) -> bool:
    p = L.p
    half = mpq(1, 2)
    for i in range(p):
        for j in range(i):
            if abs(L.mu[i][j]) > half:
                return False
    for i in range(1, p):
        lhs = norm_sq(vadd(L.g[i], tuple(L.mu[i][i - 1] * t for t in L.g[i - 1])))
        if lhs < LOVASZ * norm_sq(L.g[i - 1]):
            return False
    return True


def lll_reduce(L: LatticeBasis) -> LllResult:
    """LLL reduction carried out on the Gram matrix, tracking the transform."""
    p = L.p
    G = [list(r) for r in matmul(L.B.T, L.B).rows]
    T = [list(r) for r in Matrix.identity(p).rows]

    def col_op(k: int, l: int, q: int) -> None:
        # b_k <- b_k - q b_l
        G[k] = [a - q * b for a, b in zip(G[k], G[l])]
        for row in G:
            row[k] -= q * row[l]
        for row in T:
            row[k] -= q * row[l]

    def swap(k: int) -> None:
        G[k], G[k - 1] = G[k - 1], G[k]
        for row in G:
            row[k], row[k - 1] = row[k - 1], row[k]
        for row in T:
            row[k], row[k - 1] = row[k - 1], row[k]

    k = 1
    while k < p:
        mu, _ = _gso_from_gram(G)
        q = round_half_even(mu[k][k - 1])
        if q:
            col_op(k, k - 1, q)
        mu, bn = _gso_from_gram(G)
        if bn[k] < (LOVASZ - mu[k][k - 1] ** 2) * bn[k - 1]:
            swap(k)
            k = max(1, k - 1)
            continue
        for l in range(k - 2, -1, -1):
            q = round_half_even(mu[k][l])
            if q:
                col_op(k, l, q)
                mu, _ = _gso_from_gram(G)
        k += 1
    Tm = Matrix(T, ncols=p) if p else Matrix.zero(0, 0)
    return LllResult(LatticeBasis(matmul(L.B, Tm)), Tm)


@dataclass(frozen=True)
class Point:
    y: Vector


@dataclass(frozen=True)
class FlatDirection:
    """Direction ``v`` in the lattice span with ``v^T B`` integral.

    ``width_sq`` is the squared width ``(2 delta |v|)^2`` of the ball that
    produced it.
    """

    v: Vector
    width_sq: Rat


BallOrFlat = Union[Point, FlatDirection]


def ball_point_or_flat(a: Sequence, delta, L: LatticeBasis) -> BallOrFlat:
    """A point of ``B(a, delta)`` in the lattice coset set, or a flat direction.

    The point branch returns ``y`` with ``|y - a| <= delta`` and
    ``y`` in ``Lambda + span(Lambda)^perp``.  The flat branch returns ``v``
    with ``(2 delta |v|)^2 <= p^2 2^(p(p-1)/2)``.
    """
    a = vec(a)
    delta = mpq(delta)
    p = L.p
    if p == 0:
        return Point(a)
    red = lll_reduce(L)
    R = red.basis.B
    norms = [norm_sq(c) for c in R.columns()]
    last = max(range(p), key=lambda i: (norms[i], i))
    order = [i for i in range(p) if i != last] + [last]
    Rh = R.select_cols(order)
    # B = Rh U with U integral unimodular
    U = inverse(red.transform.select_cols(order))
    lam = left_inverse(Rh).apply(a)
    y_lat = Rh.apply([round_half_even(t) for t in lam])
    a_lat = Rh.apply(lam)
    gap = norm_sq(vsub(y_lat, a_lat))
    if gap <= delta * delta:
        y = vadd(a, vsub(y_lat, a_lat))
        if not L.contains_coset(y):
            raise AssertionError("rounded point left the lattice coset set")
        return Point(y)
    u = U.rows[p - 1]
    Bp = left_inverse(L.B)
    v = tuple(dot(u, col) for col in Bp.columns())
    wsq = 4 * delta * delta * norm_sq(v)
    if wsq > p * p * 2 ** (p * (p - 1) // 2):
        raise AssertionError("flat direction exceeds its width bound")
    return FlatDirection(v, wsq)


def lattice_project(L: LatticeBasis, subspace_basis: Matrix) -> LatticeBasis:
    """Orthogonal projection of the generators onto ``span(subspace_basis)``."""
    Pm = projector(subspace_basis)
    Bp = matmul(Pm, L.B)
    if rank(Bp) < L.p:
        raise RankDropError("projection loses rank")
    return LatticeBasis(Bp)
