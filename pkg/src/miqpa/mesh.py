"""Mesh partition with secant underestimators.

The cube ``a + [-r_d, r_d]^k`` of the first ``k`` spherical coordinates is
cut into ``phi^k`` boxes.  On each box every ``D_ii y_i^2`` is replaced by
its secant (minus ``gamma r_d^2 / phi^2`` when ``D_ii > 0``), giving a MILP;
the best box optimum is an epsilon-approximate solution.

Rather than solving all ``phi^k`` MILPs, boxes are organised in a
branch-and-bound tree over index ranges.  A range node is bounded below by
an LP whose objective uses, per coordinate, the secant over the whole range
(concave terms) or the tangent at its midpoint minus the same offset
(convex terms); both lie below every box objective in the range.  A node is
discarded only when it provably cannot contain a box that is better than
the incumbent, or equally good with a smaller index, so the returned box is
exactly the one full enumeration would pick.
"""
from __future__ import annotations

import heapq
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from gmpy2 import mpq

from .constants import phi_const
from .lp import Polyhedron, lp_optimize
from .milp import MilpInstance, milp_solve
from .rational import ZERO, Rat, Vector, ceil, floor, fmt, vadd, vscale
from .spherical import AlignedPair, SphericalForm, is_aligned

log = logging.getLogger(__name__)


class MeshInfeasibleError(ValueError):
    pass


@dataclass
class MeshStats:
    phi: int = 0
    k: int = 0
    r: int = 0
    eps: Rat = ZERO
    leaf_solves: int = 0
    bound_lps: int = 0
    range_lps: int = 0

    @property
    def box_count(self) -> int:
        return self.phi ** self.k


@dataclass(frozen=True)
class MeshResult:
    x: Vector
    y: Vector
    z: Vector
    value: Rat
    box_value: Rat
    box_index: tuple[int, ...]
    certificates: tuple[str, ...]
    stats: MeshStats = field(compare=False)


@dataclass(frozen=True)
class _Setup:
    P: Polyhedron
    p: int
    h: Vector
    ly: tuple[Vector, ...]
    D: Vector
    a: Vector
    r: int
    phi: int
    gamma: Rat
    shift: Rat  # gamma r^2 / phi^2

    def edges(self, i: int, j: int) -> tuple[Rat, Rat]:
        side = mpq(2 * self.r, self.phi)
        lo = self.a[i] - self.r + side * (j - 1)
        return lo, lo + side

    def span(self, i: int, jlo: int, jhi: int) -> tuple[Rat, Rat]:
        return self.edges(i, jlo)[0], self.edges(i, jhi)[1]

    def restricted(self, ranges) -> Polyhedron:
        rows, rhs = [], []
        for i, (jlo, jhi) in enumerate(ranges):
            lo, hi = self.span(i, jlo, jhi)
            rows += [self.ly[i], tuple(-v for v in self.ly[i])]
            rhs += [hi, -lo]
        return self.P.add_rows(rows, rhs)

    def objective(self, ranges, leaf: bool) -> tuple[Vector, Rat]:
        """Linear objective and constant of the (under)estimator on ``ranges``."""
        obj = self.h
        const = ZERO
        for i, (jlo, jhi) in enumerate(ranges):
            lo, hi = self.span(i, jlo, jhi)
            d = self.D[i]
            if d < 0 or leaf:
                # secant d (lo + hi) y - d lo hi
                obj = vadd(obj, vscale(d * (lo + hi), self.ly[i]))
                const -= d * lo * hi
            else:
                m = (lo + hi) / 2
                obj = vadd(obj, vscale(2 * d * m, self.ly[i]))
                const -= d * m * m
            if d > 0:
                const -= self.shift
        return obj, const


def _bound(setup: _Setup, ranges) -> tuple[Rat, Vector] | None:
    obj, const = setup.objective(ranges, leaf=False)
    res = lp_optimize(setup.restricted(ranges), obj)
    if not res.optimal:
        return None
    return res.value + const, res.point


def _leaf(setup: _Setup, ranges) -> tuple[Rat, Vector] | None:
    obj, const = setup.objective(ranges, leaf=True)
    res = milp_solve(MilpInstance(obj, setup.restricted(ranges), tuple(range(setup.p))))
    if not res.optimal:
        return None
    return res.value + const, res.point


def _evaluate(task):
    setup, kind, ranges = task
    if kind == "leaf":
        return _leaf(setup, ranges)
    return _bound(setup, ranges)


def mesh_approximate(sf: SphericalForm, pair: AlignedPair, eps, *, jobs: int = 1,
                     stats: MeshStats | None = None) -> MeshResult:
    """Epsilon-approximate solution of a spherical form with an aligned pair."""
    eps = mpq(eps)
    stats = stats if stats is not None else MeshStats()
    k = sf.k
    if k < 1:
        raise ValueError("mesh needs a nonzero quadratic part")
    if not is_aligned(pair, sf):
        raise ValueError("pair is not aligned for this spherical form")
    r = sf.r_d
    phi = phi_const(r, k, eps)
    gamma = abs(sf.D[0])
    shift = gamma * r * r / mpq(phi * phi)
    h_x = vadd(sf.Ly.apply(sf.c), sf.Lz.apply(sf.l))
    ly = tuple(sf.Ly.col(i) for i in range(k))
    setup = _Setup(sf.x_polytope, sf.p, h_x, ly, sf.D[:k], sf.a[:k], r, phi, gamma, shift)
    stats.phi, stats.k, stats.r, stats.eps = phi, k, r, eps

    side = mpq(2 * r, phi)
    root = []
    for i in range(k):
        lo = lp_optimize(sf.x_polytope, ly[i], "min").value
        hi = lp_optimize(sf.x_polytope, ly[i], "max").value
        stats.range_lps += 2
        jlo = max(1, ceil((lo - sf.a[i] + r) / side))
        jhi = min(phi, floor((hi - sf.a[i] + r) / side) + 1)
        root.append((jlo, jhi))
    root = tuple(root)

    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    run = (lambda tasks: list(pool.map(_evaluate, tasks))) if pool else (lambda tasks: [_evaluate(t) for t in tasks])
    try:
        best = None  # (value, index, x)
        seq = itertools.count()
        heap = []
        first = run([(setup, "bound", root)])[0]
        stats.bound_lps += 1
        if first is not None:
            heap.append((first[0], tuple(j for j, _ in root), next(seq), root))

        def dominated(lb, corner):
            return best is not None and (lb > best[0] or (lb == best[0] and corner > best[1]))

        while heap:
            batch = []
            while heap and len(batch) < max(1, jobs):
                lb, corner, _, ranges = heapq.heappop(heap)
                if not dominated(lb, corner):
                    batch.append(ranges)
            tasks, owners = [], []
            for ranges in batch:
                widths = [hi - lo for lo, hi in ranges]
                if max(widths) == 0:
                    tasks.append((setup, "leaf", ranges))
                    owners.append(("leaf", ranges))
                    continue
                i = max(range(k), key=lambda t: (widths[t], -t))
                lo, hi = ranges[i]
                mid = (lo + hi) // 2
                for part in ((lo, mid), (mid + 1, hi)):
                    child = ranges[:i] + (part,) + ranges[i + 1:]
                    tasks.append((setup, "bound", child))
                    owners.append(("bound", child))
            for (kind, ranges), res in zip(owners, run(tasks)):
                corner = tuple(j for j, _ in ranges)
                if kind == "leaf":
                    stats.leaf_solves += 1
                    if res is None:
                        continue
                    value, x = res
                    if best is None or (value, corner) < (best[0], best[1]):
                        best = (value, corner, x)
                else:
                    stats.bound_lps += 1
                    if res is not None and not dominated(res[0], corner):
                        heapq.heappush(heap, (res[0], corner, next(seq), ranges))
    finally:
        if pool:
            pool.shutdown()

    if best is None:
        raise MeshInfeasibleError("every box subproblem is infeasible")
    box_value, index, x = best
    y, z = sf.from_x(x)
    value = sf.objective(y, z)
    gap = gamma * k * r * r / mpq(phi * phi)
    certs = (
        f"phi = {phi}: least integer with 3*eps*phi^2 >= 16*k*r_d^2 (k={k}, r_d={r}, eps={fmt(eps)})",
        f"box {index} optimum {fmt(box_value)}; f(x) = {fmt(value)} <= box optimum + gamma*k*r_d^2/phi^2 = "
        f"{fmt(box_value + gap)}: {value <= box_value + gap}",
        f"box optimum <= f(y*, z*) (underestimator); aligned pair gives f_max - f* >= (3/16)*gamma = {fmt(3 * gamma / 16)}",
        f"gamma*k*r_d^2/phi^2 = {fmt(gap)} <= eps*(3/16)*gamma = {fmt(eps * 3 * gamma / 16)}: "
        f"{16 * gap <= 3 * eps * gamma}",
        f"box subproblems solved: {stats.leaf_solves} of phi^k = {stats.box_count}",
    )
    for line in certs:
        log.debug(line)
    return MeshResult(x, y, z, value, box_value, index, certs, stats)

