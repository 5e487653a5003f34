"""Elimination of implied equalities.

A hyperplane ``a^T x = beta`` intersected with ``Z^p x R^(n-p)`` is either
empty or an affine image ``{x_bar + M u : u in Z^p' x R^(n-1-p')}``.
Repeatedly substituting such parametrizations for the implied equalities of
the feasible region yields a full-dimensional instance.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm
from typing import Sequence, Union

from gmpy2 import mpq

from .instance import MiqpInstance
from .lp import InfeasibleError, implied_equalities
from .rational import ONE, ZERO, Matrix, Rat, Vector, dot, matmul, vadd, vec


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Param:
    x_bar: Vector
    M: Matrix
    p_new: int


def unimodular_to_e1(a: Sequence[int]) -> tuple[int, Matrix]:
    """``(g, U)`` with ``U`` unimodular and ``a^T U = g e_1^T``, ``g = gcd(a) >= 0``."""
    p = len(a)
    r = [int(v) for v in a]
    U = [[int(i == j) for j in range(p)] for i in range(p)]

    def col_sub(k: int, l: int, q: int) -> None:
        r[k] -= q * r[l]
        for row in U:
            row[k] -= q * row[l]

    while sum(1 for v in r if v) > 1:
        piv = min((i for i in range(p) if r[i]), key=lambda i: (abs(r[i]), i))
        for k in range(p):
            if k != piv and r[k]:
                col_sub(k, piv, r[k] // r[piv])
    nz = next((i for i in range(p) if r[i]), 0)
    if nz != 0:
        r[0], r[nz] = r[nz], r[0]
        for row in U:
            row[0], row[nz] = row[nz], row[0]
    if r[0] < 0:
        r[0] = -r[0]
        for row in U:
            row[0] = -row[0]
    return r[0], Matrix(U, ncols=p) if p else Matrix.zero(0, 0)


def reduce_hyperplane(a: Sequence, beta, p: int) -> Union[Empty, Param]:
    """Parametrize ``{x in Z^p x R^(n-p) : a^T x = beta}``."""
    a = vec(a)
    beta = mpq(beta)
    n = len(a)
    if not any(a):
        raise ValueError("hyperplane normal must be nonzero")
    cont = next((i for i in range(p, n) if a[i] != 0), None)
    if cont is not None:
        x_bar = [ZERO] * n
        x_bar[cont] = beta / a[cont]
        rows = []
        for i in range(n):
            if i == cont:
                rows.append([-a[j] / a[cont] for j in range(n) if j != cont])
            else:
                rows.append([ONE if j == i else ZERO for j in range(n) if j != cont])
        return Param(tuple(x_bar), Matrix(rows, ncols=n - 1), p)
    # only integer coordinates are involved: scale to coprime integers
    scale = lcm(*(int(v.denominator) for v in a[:p]))
    ints = [int(v * scale) for v in a[:p]]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    target = beta * scale / g
    if target.denominator != 1:
        return Empty()
    t = int(target)
    _, U = unimodular_to_e1(ints)
    x_bar = tuple(mpq(t * U[i, 0]) for i in range(p)) + (ZERO,) * (n - p)
    rows = []
    for i in range(n):
        if i < p:
            rows.append(list(U.rows[i][1:]) + [ZERO] * (n - p))
        else:
            rows.append([ZERO] * (p - 1) + [ONE if j == i - p else ZERO for j in range(n - p)])
    return Param(x_bar, Matrix(rows, ncols=n - 1), p - 1)


@dataclass(frozen=True)
class AffineMap:
    """``x = x_bar + M u``."""

    x_bar: Vector
    M: Matrix

    def __call__(self, u: Sequence) -> Vector:
        return vadd(self.x_bar, self.M.apply(u))


@dataclass(frozen=True)
class Presolved:
    instance: MiqpInstance
    map: AffineMap
    constant: Rat
    steps: tuple[str, ...]


def substitute(inst: MiqpInstance, x_bar: Sequence, M: Matrix, p_new: int) -> tuple[MiqpInstance, Rat]:
    """Instance in ``u`` for ``x = x_bar + M u`` and the constant objective shift."""
    H, h = inst.H, inst.h
    Hx = H.apply(x_bar)
    Hn = matmul(matmul(M.T, H), M)
    hn = tuple(2 * a + b for a, b in zip(M.T.apply(Hx), M.T.apply(h)))
    Wn = matmul(inst.W, M)
    wn = tuple(b - dot(row, x_bar) for row, b in zip(inst.W.rows, inst.w))
    const = dot(x_bar, Hx) + dot(h, x_bar)
    return MiqpInstance(Hn, hn, Wn, wn, p_new), const


def _drop_zero_rows(inst: MiqpInstance) -> MiqpInstance:
    rows, rhs = [], []
    for row, b in zip(inst.W.rows, inst.w):
        if any(row):
            rows.append(row)
            rhs.append(b)
        elif b < 0:
            raise InfeasibleError("constraint 0 <= negative")
    W = Matrix(rows, ncols=inst.n) if rows else Matrix.zero(0, inst.n)
    return MiqpInstance(inst.H, inst.h, W, tuple(rhs), inst.p)


def presolve_full_dim(inst: MiqpInstance) -> Presolved:
    """Eliminate implied equalities until the feasible region is full dimensional."""
    cur = _drop_zero_rows(inst.folded())
    n0 = cur.n
    x_tot: Vector = (ZERO,) * n0
    M_tot = Matrix.identity(n0)
    const = ZERO
    steps = []
    while cur.n > 0:
        eq = implied_equalities(cur.polyhedron())
        if not eq:
            break
        i = min(eq)
        a, beta = cur.W.rows[i], cur.w[i]
        res = reduce_hyperplane(a, beta, cur.p)
        if isinstance(res, Empty):
            raise InfeasibleError("implied equality has no mixed integer solution")
        kind = "integer" if res.p_new < cur.p else "continuous"
        steps.append(f"eliminated implied equality row {i} ({kind}); n {cur.n} -> {cur.n - 1}")
        cur, c = substitute(cur, res.x_bar, res.M, res.p_new)
        cur = _drop_zero_rows(cur)
        const += c
        x_tot = vadd(x_tot, M_tot.apply(res.x_bar))
        M_tot = matmul(M_tot, res.M)
    return Presolved(cur, AffineMap(x_tot, M_tot), const, tuple(steps))
