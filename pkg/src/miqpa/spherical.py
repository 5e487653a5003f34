"""Spherical form of a full-dimensional bounded instance.

The change of variables ``(y, z) = [L_y | L_z]^T x`` turns the objective
into ``y^T D y + c^T y + l^T z`` with ``D`` diagonal and
``|D_11| >= ... >= |D_dd|``, while the projection of the feasible region
onto ``y`` is sandwiched between ``B(a, 1)`` and ``B(a, r_d)``.  The
integrality of ``x_1..x_p`` becomes ``y in Lambda + span(Lambda)^perp``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from gmpy2 import mpq

from .constants import r_const
from .geometry import simultaneous_diagonalize
from .instance import MiqpInstance
from .lattice import FlatDirection, LatticeBasis, ball_point_or_flat, lattice_project
from .lp import Polyhedron, enumerate_vertices
from .rational import (
    ONE,
    ZERO,
    Matrix,
    Rat,
    Vector,
    dot,
    inverse,
    kernel_basis,
    matmul,
    norm_sq,
    orth_complement_basis,
    unit,
    vadd,
    vscale,
    vsub,
)

THREE_QUARTERS = mpq(3, 4)
QUARTER = mpq(1, 4)


@dataclass(frozen=True)
class SphericalForm:
    """Instance in spherical coordinates.

    ``Ly`` (``n x d``) and ``Lz`` map original coordinates to ``y`` and
    ``z``: ``y = Ly^T x``, ``z = Lz^T x``.  ``back`` maps ``(y, z)`` back to
    ``x``.  ``P`` is the feasible region in ``(y, z)``.
    """

    D: Vector
    c: Vector
    l: Vector
    lattice: LatticeBasis
    a: Vector
    r_d: int
    P: Polyhedron | None = None
    Ly: Matrix | None = None
    Lz: Matrix | None = None
    back: Matrix | None = None
    x_polytope: Polyhedron | None = None
    witnesses: tuple[Vector, ...] = ()

    @property
    def d(self) -> int:
        return len(self.D)

    @property
    def k(self) -> int:
        return sum(1 for v in self.D if v != 0)

    @property
    def p(self) -> int:
        return self.lattice.p

    @property
    def Dmat(self) -> Matrix:
        return Matrix.diag(self.D)

    def from_x(self, x: Sequence) -> tuple[Vector, Vector]:
        return self.Ly.T.apply(x), self.Lz.T.apply(x)

    def to_x(self, y: Sequence, z: Sequence) -> Vector:
        return self.back.apply(tuple(y) + tuple(z))

    def objective(self, y: Sequence, z: Sequence) -> Rat:
        quad = sum((di * yi * yi for di, yi in zip(self.D, y)), ZERO)
        return quad + dot(self.c, y) + dot(self.l, z)

    def inner_certified(self) -> bool:
        """``B(a, 1)`` lies in the simplex spanned by projected witnesses."""
        d = self.d
        ys = [self.Ly.T.apply(x) for x in self.witnesses]
        if len(ys) != d + 1:
            return False
        V = Matrix.from_columns([vsub(y, ys[0]) for y in ys[1:]], nrows=d)
        Vi = inverse(V)
        funcs = [(Vi.rows[i], -dot(Vi.rows[i], ys[0])) for i in range(d)]
        g0 = tuple(-sum((g[j] for g, _ in funcs), ZERO) for j in range(d))
        funcs.append((g0, ONE - sum((c for _, c in funcs), ZERO)))
        for g, c in funcs:
            slack = dot(g, self.a) + c
            if slack < 0 or norm_sq(g) > slack * slack:
                return False
        return True

    def outer_certified(self) -> bool:
        """Every vertex of the polytope projects into ``B(a, r_d)`` (small ``n`` only)."""
        r2 = self.r_d ** 2
        return all(norm_sq(vsub(self.Ly.T.apply(v), self.a)) <= r2 for v in enumerate_vertices(self.x_polytope))


def to_spherical_form(inst: MiqpInstance) -> SphericalForm:
    """Spherical form of a full-dimensional bounded instance with ``d >= 1``."""
    n, p = inst.n, inst.p
    P = inst.polyhedron()
    M = Matrix.from_columns([unit(n, i) for i in range(p)], nrows=n)
    sd = simultaneous_diagonalize(inst.H, P, M)
    d = sd.d
    if d == 0:
        raise ValueError("no quadratic or integer part: the instance is a linear program")
    Ly = sd.L
    S = sd.subspace_basis
    Dd = sd.D.diagonal()
    order = sorted(range(d), key=lambda i: -abs(Dd[i]))
    Ly_p = Ly.select_cols(order)
    Dp = tuple(Dd[i] for i in order)

    Lz = orth_complement_basis(Ly_p)
    Lfull = Ly_p.hstack(Lz)
    Linv = inverse(Lfull)
    back = Linv.T
    cl = Linv.apply(inst.h)
    c, l = cl[:d], cl[d:]
    Pyz = Polyhedron(matmul(P.W, back), P.w)
    a = Ly_p.T.apply(sd.ellipsoid.a)

    if p:
        B = Ly_p.select_rows(range(p)).T
        N = matmul(S, kernel_basis(S.select_rows(range(p))))
        Np = matmul(Ly_p.T, N)
        lattice = lattice_project(LatticeBasis(B), orth_complement_basis(Np))
    else:
        lattice = LatticeBasis(Matrix.zero(d, 0))
    return SphericalForm(
        D=Dp,
        c=c,
        l=l,
        lattice=lattice,
        a=a,
        r_d=r_const(d),
        P=Pyz,
        Ly=Ly_p,
        Lz=Lz,
        back=back,
        x_polytope=P,
        witnesses=sd.rounding.witnesses,
    )


@dataclass(frozen=True)
class AlignedPair:
    y_plus: Vector
    y_minus: Vector

    @property
    def midpoint(self) -> Vector:
        return vscale(mpq(1, 2), vadd(self.y_plus, self.y_minus))


@dataclass(frozen=True)
class Aligned:
    pair: AlignedPair


@dataclass(frozen=True)
class Flat:
    v: Vector


def aligned_or_flat(sf: SphericalForm) -> Union[Aligned, Flat]:
    """Two aligned lattice points near ``a``, or a flat lattice direction.

    Both points are searched in balls of radius 1/4 around
    ``a +- (3/4) e_1`` in the doubled lattice ``2 Lambda``.
    """
    d = sf.d
    e1 = vscale(THREE_QUARTERS, unit(d, 0))
    doubled = sf.lattice.scaled(2)
    found = []
    for centre in (vadd(sf.a, e1), vsub(sf.a, e1)):
        res = ball_point_or_flat(centre, QUARTER, doubled)
        if isinstance(res, FlatDirection):
            return Flat(vscale(2, res.v))
        found.append(res.y)
    return Aligned(AlignedPair(found[0], found[1]))


def is_aligned(pair: AlignedPair, sf: SphericalForm) -> bool:
    """Exact check of the aligned-pair conditions."""
    yp, ym = pair.y_plus, pair.y_minus
    doubled = sf.lattice.scaled(2)
    for y in (yp, ym):
        if norm_sq(vsub(y, sf.a)) > 1 or not doubled.contains_coset(y):
            return False
    diff = vsub(yp, ym)
    return diff[0] >= 1 and norm_sq(diff[1:]) <= QUARTER

