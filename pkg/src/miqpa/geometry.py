"""Ellipsoid rounding of projected polytopes and simultaneous diagonalization.

Rounding works in coordinates ``theta = S^+ x`` of the subspace spanned by
the columns of ``S``.  A simplex with vertices in the projection is grown
until no vertex can be swapped for a point that enlarges its volume by a
factor of 3/2.  At that point the projection lies inside the simplex
dilated to barycentric coordinates in ``[-3/2, 3/2]``, while the inscribed
Steiner ellipsoid of the simplex lies inside the projection.  Both facts
are re-verified exactly before returning.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .constants import q_const
from .lp import INFEASIBLE, Polyhedron, lp_optimize
from .rational import (
    ONE,
    ZERO,
    Matrix,
    Rat,
    Vector,
    dot,
    independent_columns,
    inverse,
    left_inverse,
    matmul,
    norm_sq,
    orth_complement_basis,
    sqrt_upper,
    unit,
    vsub,
    zeros,
)
from .symdec import ldl_decompose

GROWTH = mpq(3, 2)


class RoundingError(ValueError):
    """The projection is empty, unbounded or lower dimensional."""


@dataclass(frozen=True)
class SubspaceEllipsoid:
    """``{x in span(S) : |L^T (x - a)| <= 1}``."""

    subspace_basis: Matrix
    a: Vector
    L: Matrix

    def gauge_sq(self, x: Sequence) -> Rat:
        return norm_sq(self.L.T.apply(vsub(x, self.a)))


@dataclass(frozen=True)
class Rounding:
    """Inner ellipsoid ``E(a, C)`` with outer ellipsoid ``E(a, C / (2 d^(3/2)))``.

    ``witnesses`` are points of the polytope whose projections are the
    vertices of the certifying simplex.
    """

    ellipsoid: SubspaceEllipsoid
    witnesses: tuple[Vector, ...]
    outer_factor_sq: Rat  # 4 d^3


def _theta_lp(P: Polyhedron, Sp: Matrix, g: Sequence, sense: str) -> Vector:
    res = lp_optimize(P, Sp.T.apply(g), sense)
    if res.status == INFEASIBLE:
        raise RoundingError("polytope is empty")
    if not res.optimal:
        raise RoundingError("projection is unbounded")
    return res.point


def inscribe_ellipsoid(P: Polyhedron, subspace_basis: Matrix) -> Rounding:
    S = subspace_basis
    n, d = S.shape
    if d == 0:
        return Rounding(SubspaceEllipsoid(S, zeros(n), Matrix.zero(n, 0)), (), ZERO)
    Sp = left_inverse(S)
    theta = Sp.apply

    xs = [_theta_lp(P, Sp, unit(d, 0), "min")]
    ths = [theta(xs[0])]
    for _ in range(d):
        U = Matrix.from_columns([vsub(t, ths[0]) for t in ths[1:]], nrows=d)
        u = orth_complement_basis(U).col(0)
        x_hi = _theta_lp(P, Sp, u, "max")
        x_lo = _theta_lp(P, Sp, u, "min")
        dev_hi = dot(u, vsub(theta(x_hi), ths[0]))
        dev_lo = dot(u, vsub(ths[0], theta(x_lo)))
        if dev_hi == 0 and dev_lo == 0:
            raise RoundingError("projection is lower dimensional")
        x = x_hi if dev_hi >= dev_lo else x_lo
        xs.append(x)
        ths.append(theta(x))

    def barycentric():
        V = Matrix.from_columns([vsub(t, ths[0]) for t in ths[1:]], nrows=d)
        Vi = inverse(V)
        funcs = []
        for i in range(1, d + 1):
            g = Vi.rows[i - 1]
            funcs.append((g, -dot(g, ths[0])))
        g0 = tuple(-sum((f[0][j] for f in funcs), ZERO) for j in range(d))
        c0 = ONE - sum((f[1] for f in funcs), ZERO)
        return [(g0, c0)] + funcs

    changed = True
    while changed:
        changed = False
        funcs = barycentric()
        for i, (g, c) in enumerate(funcs):
            for sense in ("max", "min"):
                x = _theta_lp(P, Sp, g, sense)
                val = dot(g, theta(x)) + c
                if (sense == "max" and val >= GROWTH) or (sense == "min" and val <= -GROWTH):
                    xs[i] = x
                    ths[i] = theta(x)
                    changed = True
                    break
            if changed:
                break
    funcs = barycentric()

    center = tuple(sum((t[j] for t in ths), ZERO) / (d + 1) for j in range(d))
    cov = [[ZERO] * d for _ in range(d)]
    for t in ths:
        dv = vsub(t, center)
        for i in range(d):
            for j in range(d):
                cov[i][j] += dv[i] * dv[j]
    A = inverse(Matrix(cov, ncols=d)).scale(d * (d + 1))
    ldl = ldl_decompose(A)
    deltas = [sqrt_upper(v) for v in ldl.D.diagonal()]
    Q = matmul(ldl.L, Matrix.diag(deltas))
    Qi = inverse(Q)

    # inner: each simplex facet {lambda_i >= 0} contains the ellipsoid
    for g, c in funcs:
        slack = dot(g, center) + c
        if slack < 0 or norm_sq(Qi.apply(g)) > slack * slack:
            raise RoundingError("inner containment certificate failed")
    # outer: vertices of {|lambda_i| <= 3/2} lie in the dilated ellipsoid
    bound = mpq(4 * d ** 3)
    Qt = Q.T
    for free in range(d + 1):
        for signs in itertools.product((GROWTH, -GROWTH), repeat=d):
            lam = list(signs)
            lf = ONE - sum(lam, ZERO)
            if abs(lf) > GROWTH:
                continue
            lam.insert(free, lf)
            pt = tuple(sum((lam[i] * ths[i][j] for i in range(d + 1)), ZERO) for j in range(d))
            if norm_sq(Qt.apply(vsub(pt, center))) > bound:
                raise RoundingError("outer containment certificate failed")

    C = matmul(Sp.T, Q)
    a = S.apply(center)
    return Rounding(SubspaceEllipsoid(S, a, C), tuple(xs), bound)


@dataclass(frozen=True)
class SimDiagResult:
    """``H = L D L^T`` with ``E(a, L)`` inside the projection and ``E(a, L / rho)`` outside.

    ``rho = 2 d^(3/2) q_d^2``; ``rho_sq`` stores ``4 d^3 q_d^4``.
    """

    subspace_basis: Matrix
    D: Matrix
    ellipsoid: SubspaceEllipsoid
    d: int
    rounding: Rounding | None
    rho_sq: Rat

    @property
    def L(self) -> Matrix:
        return self.ellipsoid.L


def simultaneous_diagonalize(H: Matrix, P: Polyhedron, M_basis: Matrix) -> SimDiagResult:
    n = H.nrows
    ldl = ldl_decompose(H)
    nz = [i for i, v in enumerate(ldl.D.diagonal()) if v != 0]
    L2 = ldl.L.select_cols(nz)
    D2 = Matrix.diag([ldl.D[i, i] for i in nz])
    joined = M_basis.hstack(L2)
    S = joined.select_cols(independent_columns(joined))
    d = S.ncols
    if d == 0:
        empty = Matrix.zero(n, 0)
        return SimDiagResult(empty, Matrix.zero(0, 0), SubspaceEllipsoid(empty, zeros(n), empty), 0, None, ZERO)
    rounding = inscribe_ellipsoid(P, S)
    C = rounding.ellipsoid.L
    Mm = matmul(left_inverse(C), L2)
    Ht = matmul(matmul(Mm, D2), Mm.T)
    ldl2 = ldl_decompose(Ht)
    q = q_const(d)
    D = ldl2.D.scale(mpq(1, q * q))
    L = matmul(C, ldl2.L).scale(q)
    ell = SubspaceEllipsoid(S, rounding.ellipsoid.a, L)
    return SimDiagResult(S, D, ell, d, rounding, mpq(4 * d ** 3 * q ** 4))

