"""Exact branch-and-bound for mixed integer linear programs.

Nodes are explored depth first; among nodes of equal depth the one with
the best relaxation bound goes first.  Branching is on the most fractional
integer variable.  Optionally, deep nodes branch along a flat lattice
direction of an ellipsoid inscribed in the node's projection onto the
integer variables.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .geometry import RoundingError, inscribe_ellipsoid
from .lattice import FlatDirection, LatticeBasis, ball_point_or_flat
from .lp import INFEASIBLE, OPTIMAL, UNBOUNDED, Polyhedron, lp_optimize
from .rational import Matrix, Rat, Vector, ceil, floor, unit, vec

HALF = mpq(1, 2)


class UnboundedRelaxationError(ValueError):
    pass


@dataclass(frozen=True)
class MilpInstance:
    objective: Vector
    P: Polyhedron
    integer_mask: tuple[int, ...] = ()
    bounds: tuple[tuple[Rat, Rat], ...] | None = None

    def polyhedron(self) -> Polyhedron:
        if self.bounds is None:
            return self.P
        n = self.P.dim
        rows, rhs = [], []
        for i, (lo, hi) in enumerate(self.bounds):
            e = unit(n, i)
            rows += [e, tuple(-v for v in e)]
            rhs += [hi, -lo]
        return self.P.add_rows(rows, rhs)


@dataclass(frozen=True)
class MilpResult:
    status: str
    point: Vector | None = None
    value: Rat | None = None
    nodes: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _most_fractional(x: Sequence, mask: Sequence[int]) -> int | None:
    best, best_gap = None, None
    for j in mask:
        frac = x[j] - floor(x[j])
        if frac == 0:
            continue
        gap = abs(frac - HALF)
        if best_gap is None or gap < best_gap:
            best, best_gap = j, gap
    return best


def _flat_children(P: Polyhedron, mask: Sequence[int]):
    """Equality branches ``u^T x_I = t`` along a flat integral direction, or ``None``."""
    n = P.dim
    S = Matrix.from_columns([unit(n, j) for j in mask], nrows=n)
    try:
        rounding = inscribe_ellipsoid(P, S)
    except RoundingError:
        return None
    C = rounding.ellipsoid.L.select_rows(mask)
    centre = C.T.apply([rounding.ellipsoid.a[j] for j in mask])
    res = ball_point_or_flat(centre, 1, LatticeBasis(C.T))
    if not isinstance(res, FlatDirection):
        return None
    u = C.apply(res.v)  # integral by construction
    direction = [mpq(0)] * n
    for j, uj in zip(mask, u):
        direction[j] = uj
    lo = lp_optimize(P, direction, "min").value
    hi = lp_optimize(P, direction, "max").value
    return [(direction, t) for t in range(ceil(lo), floor(hi) + 1)]


def _branch_and_bound(P: Polyhedron, c: Vector, mask: Sequence[int], first_only: bool,
                      flat_depth: int | None) -> MilpResult:
    root = lp_optimize(P, c)
    if root.status == INFEASIBLE:
        return MilpResult(INFEASIBLE, nodes=1)
    if root.status == UNBOUNDED:
        raise UnboundedRelaxationError("relaxation is unbounded; supply bounds")
    seq = itertools.count()
    heap = [(0, root.value, next(seq), P, root.point)]
    best = None
    nodes = 1
    while heap:
        negdepth, value, _, node, x = heapq.heappop(heap)
        if best is not None and value >= best[0]:
            continue
        j = _most_fractional(x, mask)
        if j is None:
            best = (value, x)
            if first_only:
                break
            continue
        children = None
        if flat_depth is not None and -negdepth >= flat_depth:
            flat = _flat_children(node, mask)
            if flat is not None:
                children = [node.add_equality(a, t) for a, t in flat]
        if children is None:
            e = unit(P.dim, j)
            children = [
                node.add_rows([e], [floor(x[j])]),
                node.add_rows([tuple(-v for v in e)], [-ceil(x[j])]),
            ]
        for child in children:
            res = lp_optimize(child, c)
            nodes += 1
            if res.optimal and (best is None or res.value < best[0]):
                heapq.heappush(heap, (negdepth - 1, res.value, next(seq), child, res.point))
    if best is None:
        return MilpResult(INFEASIBLE, nodes=nodes)
    return MilpResult(OPTIMAL, tuple(best[1]), best[0], nodes)


def milp_solve(m: MilpInstance, flat_depth: int | None = None) -> MilpResult:
    """Exact optimum of ``min objective^T x`` over the mixed integer set."""
    c = vec(m.objective)
    return _branch_and_bound(m.polyhedron(), c, sorted(m.integer_mask), False, flat_depth)


def milp_feasible(P: Polyhedron, integer_mask: Sequence[int] = (), bounds=None) -> Vector | None:
    """Some mixed integer point of ``P`` (within ``bounds``), or ``None``."""
    m = MilpInstance(tuple(mpq(0) for _ in range(P.dim)), P, tuple(integer_mask), bounds)
    res = _branch_and_bound(m.polyhedron(), m.objective, sorted(m.integer_mask), True, None)
    return res.point

