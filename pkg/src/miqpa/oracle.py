"""Brute-force brackets for the optimum and the maximum of small instances.

Every integer assignment within the LP bounds is enumerated.  On each
fiber the extrema of the quadratic over the continuous polytope are found
exactly by visiting every face: for each independent set of active
constraints, the stationary point of the quadratic restricted to the
face's affine hull is a candidate whenever that restriction is
nondegenerate.  If the restriction is degenerate at an extremum, the
objective is constant along a line through it inside the face, so the same
value reappears on a smaller face; vertices close the recursion.  The
brackets are therefore tight.  A feasible grid of the requested resolution
is evaluated as an independent consistency check.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, replace
from typing import Sequence

from gmpy2 import mpq

from .instance import MiqpInstance
from .lp import Polyhedron, lp_optimize
from .rational import (
    ZERO,
    Matrix,
    Rat,
    SingularMatrixError,
    Vector,
    ceil,
    dot,
    floor,
    kernel_basis,
    matmul,
    rank,
    rref,
    solve,
    vec,
)

DEFAULT_RESOLUTION = mpq(1, 64)


class OracleLimitError(ValueError):
    pass


class OracleInconsistencyError(AssertionError):
    pass


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"
    INFEASIBLE = "INFEASIBLE"


@dataclass(frozen=True)
class OracleReport:
    f_star_lo: Rat
    f_star_hi: Rat
    f_max_lo: Rat
    f_max_hi: Rat
    resolution: Rat
    argmin: Vector | None = None
    argmax: Vector | None = None
    grid_points: int = 0
    candidate_value: Rat | None = None
    certified_ratio_hi: Rat | None = None

    @property
    def feasible(self) -> bool:
        return self.argmin is not None

    def with_candidate(self, value) -> "OracleReport":
        """Attach ``value`` and an upper bound on its gap ratio."""
        value = mpq(value)
        den = self.f_max_lo - self.f_star_lo
        ratio = (value - self.f_star_lo) / den if den > 0 else ZERO
        return replace(self, candidate_value=value, certified_ratio_hi=ratio)


def _integer_ranges(inst: MiqpInstance) -> list[range]:
    P = inst.polyhedron()
    out = []
    for i in range(inst.p):
        e = [0] * inst.n
        e[i] = 1
        lo = lp_optimize(P, e, "min")
        hi = lp_optimize(P, e, "max")
        if not (lo.optimal and hi.optimal):
            raise OracleLimitError("integer variables must be bounded")
        out.append(range(ceil(lo.value), floor(hi.value) + 1))
    return out


def _particular(A: Matrix, b: Sequence) -> Vector | None:
    aug = A.hstack(Matrix([[v] for v in b], ncols=1))
    rows, pivots = rref(aug)
    if pivots and pivots[-1] == A.ncols:
        return None
    x = [ZERO] * A.ncols
    for r, pc in zip(rows, pivots):
        x[pc] = r[-1]
    return tuple(x)


def _fiber_extrema(Hcc: Matrix, b: Vector, W: list, w: list) -> list[Vector]:
    """Candidate extremizers of ``y^T Hcc y + b^T y`` over ``{W y <= w}``."""
    m = Hcc.nrows
    out = []
    rows = list(range(len(W)))
    for size in range(0, m + 1):
        for act in itertools.combinations(rows, size):
            if size:
                A = Matrix([W[i] for i in act], ncols=m)
                if rank(A) < size:
                    continue
                y0 = _particular(A, [w[i] for i in act])
                if y0 is None:
                    continue
                N = kernel_basis(A)
            else:
                y0 = (ZERO,) * m
                N = Matrix.identity(m)
            if N.ncols:
                Hr = matmul(matmul(N.T, Hcc), N).scale(2)
                g = N.T.apply(tuple(2 * s + t for s, t in zip(Hcc.apply(y0), b)))
                try:
                    t = solve(Hr, [-v for v in g])
                except SingularMatrixError:
                    continue
                y = tuple(a + c for a, c in zip(y0, N.apply(t)))
            else:
                y = y0
            if all(dot(W[i], y) <= w[i] for i in rows):
                out.append(y)
    return out


def _grid(lo: Sequence, hi: Sequence, resolution: Rat, cap: int) -> list[Vector]:
    m = len(lo)
    if m == 0:
        return [()]
    per_axis = max(2, int(math.floor(cap ** (1.0 / m))))
    axes = []
    for a, c in zip(lo, hi):
        steps = max(1, ceil(1 / resolution))
        steps = min(steps, per_axis - 1)
        axes.append([a + (c - a) * mpq(j, steps) for j in range(steps + 1)] if c > a else [a])
    return list(itertools.product(*axes))


def oracle_bracket(inst: MiqpInstance, resolution=DEFAULT_RESOLUTION, *, max_n: int = 4, max_p: int = 2,
                   grid_cap: int = 2000) -> OracleReport:
    """Brackets ``[f*_lo, f*_hi]`` and ``[fmax_lo, fmax_hi]`` by exhaustive search."""
    resolution = mpq(resolution)
    if inst.n > max_n or inst.p > max_p:
        raise OracleLimitError(f"oracle limited to n <= {max_n}, p <= {max_p}")
    n, p = inst.n, inst.p
    P = inst.polyhedron()
    H, h = inst.H, inst.h
    Hcc = Matrix([row[p:] for row in H.rows[p:]], ncols=n - p) if n > p else Matrix.zero(0, 0)
    best_lo = best_hi = None
    grid_count = 0
    grid_vals = []
    for ints in itertools.product(*_integer_ranges(inst)):
        ints = vec(ints)
        W, w = [], []
        ok = True
        for row, rhs in zip(P.W.rows, P.w):
            cont = row[p:]
            r = rhs - dot(row[:p], ints)
            if any(cont):
                W.append(cont)
                w.append(r)
            elif r < 0:
                ok = False
                break
        if not ok:
            continue
        if n == p:
            ys = [()]
        else:
            b = tuple(2 * sum((H[i][j] * ints[j] for j in range(p)), ZERO) + h[i] for i in range(p, n))
            ys = _fiber_extrema(Hcc, b, W, w)
        for y in ys:
            x = ints + y
            val = inst.objective(x)
            if best_lo is None or (val, x) < best_lo:
                best_lo = (val, x)
            if best_hi is None or (val, x) > best_hi:
                best_hi = (val, x)
        if n > p and ys:
            Pf = Polyhedron(Matrix(W, ncols=n - p) if W else Matrix.zero(0, n - p), tuple(w))
            lo = [lp_optimize(Pf, [int(i == j) for j in range(n - p)], "min").value for i in range(n - p)]
            hi = [lp_optimize(Pf, [int(i == j) for j in range(n - p)], "max").value for i in range(n - p)]
            for y in _grid(lo, hi, resolution, grid_cap):
                if Pf.contains(y):
                    grid_count += 1
                    grid_vals.append(inst.objective(ints + tuple(y)))
    if best_lo is None:
        return OracleReport(ZERO, ZERO, ZERO, ZERO, resolution)
    for v in grid_vals:
        if v < best_lo[0] or v > best_hi[0]:
            raise OracleInconsistencyError("grid value outside the exact extrema")
    return OracleReport(best_lo[0], best_lo[0], best_hi[0], best_hi[0], resolution,
                        best_lo[1], best_hi[1], grid_count)


def check_solution(inst: MiqpInstance, x: Sequence, eps, report: OracleReport) -> Verdict:
    """Sound verdict on ``f(x) - f* <= eps (f_max - f*)`` given the brackets."""
    x = vec(x)
    eps = mpq(eps)
    if not inst.is_feasible(x):
        return Verdict.INFEASIBLE
    fx = inst.objective(x)
    if fx - report.f_star_lo <= eps * (report.f_max_lo - report.f_star_lo):
        return Verdict.PASS
    if fx - report.f_star_hi > eps * (report.f_max_hi - report.f_star_hi):
        return Verdict.FAIL
    return Verdict.INCONCLUSIVE
