"""Exact linear programming over ``{x : W x <= w}``.

The solver is a primal simplex method that walks between vertices of the
inequality system directly (no slack variables).  Pivot choices follow
Bland's rule, so it terminates on degenerate problems and its output is a
deterministic function of the input.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .rational import (
    ZERO,
    DimensionError,
    Matrix,
    Rat,
    Vector,
    dot,
    independent_columns,
    inverse,
    kernel_basis,
    orth_complement_basis,
    rank,
    solve,
    vec,
)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class InfeasibleError(ValueError):
    pass


class UnboundedError(ValueError):
    pass


@dataclass(frozen=True)
class Polyhedron:
    W: Matrix
    w: Vector

    def __post_init__(self):
        if self.W.nrows != len(self.w):
            raise DimensionError(f"W has {self.W.nrows} rows but w has {len(self.w)} entries")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], rhs: Sequence, n: int) -> "Polyhedron":
        return cls(Matrix(rows, ncols=n), vec(rhs))

    @classmethod
    def box(cls, lo: Sequence, hi: Sequence) -> "Polyhedron":
        lo, hi = vec(lo), vec(hi)
        n = len(lo)
        rows, rhs = [], []
        for i in range(n):
            e = [0] * n
            e[i] = 1
            rows += [e, [-v for v in e]]
            rhs += [hi[i], -lo[i]]
        return cls.from_rows(rows, rhs, n)

    @property
    def dim(self) -> int:
        return self.W.ncols

    @property
    def nrows(self) -> int:
        return self.W.nrows

    def contains(self, x: Sequence) -> bool:
        return all(dot(row, x) <= b for row, b in zip(self.W.rows, self.w))

    def slack(self, x: Sequence) -> Vector:
        return tuple(b - dot(row, x) for row, b in zip(self.W.rows, self.w))

    def add_rows(self, rows: Sequence[Sequence], rhs: Sequence) -> "Polyhedron":
        if not rows:
            return self
        extra = Matrix(rows, ncols=self.dim)
        return Polyhedron(self.W.vstack(extra), self.w + vec(rhs))

    def add_equality(self, a: Sequence, beta) -> "Polyhedron":
        a = vec(a)
        return self.add_rows([a, tuple(-v for v in a)], [beta, -vec([beta])[0]])


@dataclass(frozen=True)
class LpResult:
    status: str
    point: Vector | None = None
    value: Rat | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _independent_rows(W: list[list], candidates: Sequence[int], n: int) -> list[int]:
    """Greedy choice of up to ``n`` linearly independent rows among ``candidates``."""
    if not candidates:
        return []
    sub = Matrix([W[i] for i in candidates], ncols=n)
    return [candidates[j] for j in independent_columns(sub.T)][:n]


def _simplex(W: list[list], w: list, c: list, x: list, basis: list[int]):
    """Phase 2 from a vertex ``x`` whose tight rows ``basis`` are independent.

    Minimizes ``c^T x``.  Returns ``(status, x, basis)``.
    """
    n = len(c)
    m = len(W)
    binv = [list(r) for r in inverse(Matrix([W[i] for i in basis], ncols=n)).rows]
    in_basis = [False] * m
    for i in basis:
        in_basis[i] = True
    while True:
        # multipliers: c + W_A^T lam = 0  =>  lam = -(Binv)^T c
        lam = [-sum((binv[r][j] * c[r] for r in range(n) if c[r]), ZERO) for j in range(n)]
        leaving = None
        for pos in sorted(range(n), key=lambda q: basis[q]):
            if lam[pos] < 0:
                leaving = pos
                break
        if leaving is None:
            return OPTIMAL, x, basis
        d = [-binv[r][leaving] for r in range(n)]
        best = None
        best_t = None
        for i in range(m):
            if in_basis[i]:
                continue
            wd = dot(W[i], d)
            if wd > 0:
                t = (w[i] - dot(W[i], x)) / wd
                if best_t is None or t < best_t:
                    best, best_t = i, t
        if best is None:
            return UNBOUNDED, None, None
        if best_t:
            x = [xi + best_t * di for xi, di in zip(x, d)]
        # row replacement update of the inverse (Sherman-Morrison)
        r = W[best]
        col = [binv[q][leaving] for q in range(n)]
        denom = dot(r, col)
        rb = [sum((r[q] * binv[q][j] for q in range(n) if r[q]), ZERO) for j in range(n)]
        rb[leaving] -= 1
        for q in range(n):
            if col[q]:
                f = col[q] / denom
                row = binv[q]
                for j in range(n):
                    if rb[j]:
                        row[j] -= f * rb[j]
        in_basis[basis[leaving]] = False
        in_basis[best] = True
        basis = basis[:leaving] + [best] + basis[leaving + 1:]


def _initial_vertex(W: list[list], w: list, n: int):
    """A vertex of ``{W x <= w}`` (full column rank ``W``) or ``None``."""
    m = len(W)
    base = _independent_rows(W, list(range(m)), n)
    x0 = list(solve(Matrix([W[i] for i in base], ncols=n), [w[i] for i in base]))
    viol = [dot(W[i], x0) - w[i] for i in range(m)]
    worst = max(viol) if viol else ZERO
    if worst <= 0:
        return x0, base
    # auxiliary problem in (x, t): minimize t
    in_base = set(base)
    aux_W = []
    aux_w = []
    for i in range(m):
        aux_W.append(list(W[i]) + [ZERO if i in in_base else mpq(-1)])
        aux_w.append(w[i])
    aux_W.append([ZERO] * n + [mpq(-1)])
    aux_w.append(ZERO)
    entering = min(i for i in range(m) if viol[i] == worst)
    status, xt, aux_basis = _simplex(aux_W, aux_w, [ZERO] * n + [mpq(1)], x0 + [worst], base + [entering])
    assert status == OPTIMAL
    if xt[n] > 0:
        return None
    x = xt[:n]
    rows = [i for i in aux_basis if i < m]
    basis = _independent_rows(W, sorted(rows), n)
    if len(basis) < n:
        tight = [i for i in range(m) if dot(W[i], x) == w[i]]
        basis = _independent_rows(W, tight, n)
    return x, basis


def lp_optimize(P: Polyhedron, objective: Sequence, sense: str = "min") -> LpResult:
    """Optimize ``objective^T x`` over ``P`` exactly."""
    n = P.dim
    c = vec(objective)
    if len(c) != n:
        raise DimensionError("objective length differs from the polyhedron dimension")
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    if sense == "max":
        c = tuple(-v for v in c)
    res = _minimize(P, c)
    if sense == "max" and res.optimal:
        res = LpResult(OPTIMAL, res.point, -res.value)
    return res


def _minimize(P: Polyhedron, c: Vector) -> LpResult:
    n = P.dim
    W, w = [], []
    for row, b in zip(P.W.rows, P.w):
        if any(row):
            W.append(list(row))
            w.append(b)
        elif b < 0:
            return LpResult(INFEASIBLE)
    if n == 0:
        return LpResult(OPTIMAL, (), ZERO)
    Wm = Matrix(W, ncols=n) if W else Matrix.zero(0, n)
    r = rank(Wm)
    if r < n:
        # lineality space K = ker W; optimize over its orthogonal complement
        K = kernel_basis(Wm)
        bounded = all(dot(c, k) == 0 for k in K.columns())
        R = orth_complement_basis(K)
        if r == 0:
            return LpResult(OPTIMAL, (ZERO,) * n, ZERO) if bounded else LpResult(UNBOUNDED)
        WR = [list(R.T.apply(row)) for row in W]  # rows of W R
        cR = list(R.T.apply(c))
        start = _initial_vertex(WR, w, r)
        if start is None:
            return LpResult(INFEASIBLE)
        if not bounded:
            return LpResult(UNBOUNDED)
        status, u, _ = _simplex(WR, w, cR, *start)
        if status != OPTIMAL:
            return LpResult(status)
        x = R.apply(u)
        return LpResult(OPTIMAL, x, dot(c, x))
    start = _initial_vertex(W, w, n)
    if start is None:
        return LpResult(INFEASIBLE)
    status, x, _ = _simplex(W, w, list(c), *start)
    if status != OPTIMAL:
        return LpResult(status)
    x = tuple(x)
    return LpResult(OPTIMAL, x, dot(c, x))


def feasible_point(P: Polyhedron) -> Vector | None:
    res = lp_optimize(P, (ZERO,) * P.dim)
    return res.point if res.optimal else None


def implied_equalities(P: Polyhedron) -> frozenset[int]:
    """Rows ``i`` with ``W_i x = w_i`` for every ``x`` in ``P``."""
    x0 = feasible_point(P)
    if x0 is None:
        raise InfeasibleError("implied equalities of an empty polyhedron")
    witnesses = [x0]
    implied = set()
    for i, (row, b) in enumerate(zip(P.W.rows, P.w)):
        if any(dot(row, x) < b for x in witnesses):
            continue
        res = lp_optimize(P, row, "min")
        if res.optimal and res.value == b:
            implied.add(i)
        elif res.optimal:
            witnesses.append(res.point)
    return frozenset(implied)


def width_along(P: Polyhedron, v: Sequence) -> Rat:
    lo = lp_optimize(P, v, "min")
    hi = lp_optimize(P, v, "max")
    if lo.status == INFEASIBLE:
        raise InfeasibleError("width of an empty polyhedron")
    if not (lo.optimal and hi.optimal):
        raise UnboundedError("polyhedron is unbounded along the direction")
    return hi.value - lo.value


def enumerate_vertices(P: Polyhedron, limit: int = 6) -> list[Vector]:
    """All vertices by exhaustive basis enumeration (small ``n`` only)."""
    n = P.dim
    if n > limit:
        raise ValueError(f"vertex enumeration limited to dimension {limit}, got {n}")
    if n == 0:
        return [()] if P.contains(()) else []
    found = []
    seen = set()
    for rows in itertools.combinations(range(P.nrows), n):
        A = P.W.select_rows(rows)
        if rank(A) < n:
            continue
        x = solve(A, [P.w[i] for i in rows])
        if x not in seen and P.contains(x):
            seen.add(x)
            found.append(x)
    found.sort()
    return found
