"""Recursive driver producing an epsilon-approximate solution.

Each pending instance is the input plus some linear equalities.  An
instance is made full dimensional, then either solved exactly (no quadratic
part), approximated on a mesh (aligned pair found), or cut into integer
slices along a flat direction which are queued as new instances.  The best
candidate over all processed instances is returned.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from gmpy2 import mpq

from .constants import iteration_bound, s_bar
from .instance import MiqpInstance, Solution
from .lp import lp_optimize
from .mesh import MeshStats, mesh_approximate
from .milp import MilpInstance, milp_feasible, milp_solve
from .presolve import presolve_full_dim
from .rational import Rat, Vector, ceil, dot, floor, fmt, left_inverse, rank
from .spherical import Aligned, SphericalForm, aligned_or_flat, to_spherical_form

log = logging.getLogger(__name__)


class UnboundedInstanceError(ValueError):
    pass


@dataclass
class SolveStats:
    enqueued: int = 0
    processed: int = 0
    flat_branches: int = 0
    mesh_calls: int = 0
    milp_calls: int = 0
    bound: Rat | None = None
    mesh: list[MeshStats] = field(default_factory=list)


@dataclass
class WorkSet:
    pending: list[MiqpInstance] = field(default_factory=list)
    candidates: list[Solution] = field(default_factory=list)


def decompose_flat(sf: SphericalForm, v: Vector, inst: MiqpInstance) -> list[MiqpInstance]:
    """Slices ``v^T y = t`` of ``inst`` for integers ``t`` meeting the polytope.

    ``t`` runs from ``ceil(mu)`` to ``floor(mu + r_d * s_bar_p)``, where
    ``mu`` is the minimum of ``v^T y``, clipped to the maximum of ``v^T y``.
    """
    a = sf.Ly.apply(v)
    P = inst.polyhedron()
    mu = lp_optimize(P, a, "min").value
    top = lp_optimize(P, a, "max").value
    last = min(floor(mu + sf.r_d * s_bar(sf.p)), floor(top))
    return [inst.with_equality(a, t) for t in range(ceil(mu), last + 1)]


def with_box(inst: MiqpInstance, psi: int | None) -> MiqpInstance:
    if psi is None:
        return inst
    box = mpq(2) ** psi
    bounds = inst.bounds or tuple((-box, box) for _ in range(inst.n))
    bounds = tuple((max(lo, -box), min(hi, box)) for lo, hi in bounds)
    return MiqpInstance(inst.H, inst.h, inst.W, inst.w, inst.p, bounds, inst.equalities)


def _check_bounded(inst: MiqpInstance) -> None:
    P = inst.polyhedron()
    n = inst.n
    for i in range(n):
        e = [0] * n
        e[i] = 1
        for sense in ("min", "max"):
            res = lp_optimize(P, e, sense)
            if res.status == "unbounded":
                raise UnboundedInstanceError(f"variable {i} is unbounded; supply bounds or psi")


def solve(inst: MiqpInstance, eps, *, psi: int | None = None, jobs: int = 1,
          stats: SolveStats | None = None) -> Solution | None:
    """Epsilon-approximate solution of a bounded instance, or ``None`` if infeasible."""
    eps = mpq(eps)
    if not (0 < eps <= 1):
        raise ValueError("epsilon must lie in (0, 1]")
    stats = stats if stats is not None else SolveStats()
    inst = with_box(inst, psi)
    _check_bounded(inst)
    p = inst.p
    stats.bound = iteration_bound(rank(inst.H), p)
    mask = tuple(range(p))

    if milp_feasible(inst.polyhedron(), mask) is None:
        return None
    work = WorkSet(pending=[inst])
    stats.enqueued = 1
    while work.pending:
        cur = work.pending.pop()
        stats.processed += 1
        pre = presolve_full_dim(cur)
        J = pre.instance
        trail = tuple("slice " + " + ".join(f"{fmt(c)}*x{j + 1}" for j, c in enumerate(a) if c) + f" = {fmt(b)}"
                      for a, b in cur.equalities[len(inst.equalities):])
        trail += pre.steps
        if J.n == 0 or J.H.is_zero():
            stats.milp_calls += 1
            if J.n == 0:
                u = ()
            else:
                res = milp_solve(MilpInstance(J.h, J.polyhedron(), tuple(range(J.p))))
                u = res.point
            x = pre.map(u)
            work.candidates.append(Solution(x, inst.objective(x), trail + ("exact MILP (no quadratic part)",),
                                            ("linear objective solved exactly by branch-and-bound",)))
            continue
        sf = to_spherical_form(J)
        branch = aligned_or_flat(sf)
        head = f"spherical form d={sf.d} k={sf.k} p={sf.p} r_d={sf.r_d}"
        if isinstance(branch, Aligned):
            mstats = MeshStats()
            m = mesh_approximate(sf, branch.pair, eps, jobs=jobs, stats=mstats)
            stats.mesh_calls += 1
            stats.mesh.append(mstats)
            x = pre.map(m.x)
            work.candidates.append(Solution(x, inst.objective(x),
                                            trail + (head, f"aligned pair; mesh phi={mstats.phi}"),
                                            m.certificates))
            continue
        stats.flat_branches += 1
        Mp = left_inverse(pre.map.M)
        for s in decompose_flat(sf, branch.v, J):
            a_u, t = s.equalities[-1]
            a_x = Mp.T.apply(a_u)
            beta = t + dot(a_u, Mp.apply(pre.map.x_bar))
            child = cur.with_equality(a_x, beta)
            if milp_feasible(child.polyhedron(), mask) is not None:
                work.pending.append(child)
                stats.enqueued += 1
        log.debug("%s; flat direction, %d instances pending", head, len(work.pending))
    if not work.candidates:
        return None
    best = min(work.candidates, key=lambda s: (s.value, s.x))
    log.info("solved: value %s after %d instances (bound %s)", fmt(best.value), stats.enqueued, fmt(stats.bound))
    return best

