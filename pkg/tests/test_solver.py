import itertools
import random

import pytest
from gmpy2 import mpq

from corpus import random_instance
from miqpa.instance import MiqpInstance
from miqpa.lp import feasible_point, lp_optimize
from miqpa.oracle import Verdict, check_solution, oracle_bracket
from miqpa.presolve import presolve_full_dim
from miqpa.rational import ceil, dot, floor
from miqpa.solver import SolveStats, UnboundedInstanceError, decompose_flat, solve
from miqpa.spherical import Flat, aligned_or_flat, to_spherical_form


def test_pure_milp_exact():
    inst = MiqpInstance.build([[0, 0], [0, 0]], [-1, -2], [[1, 1]], [mpq(7, 2)], 1, [(0, 3), (0, 3)])
    sol = solve(inst, 1)
    # x1 = 0 gives x2 = 3 and x1 = 1 gives x2 = 5/2; both cost -6
    assert sol.value == -6 and sol.x in ((0, 3), (1, mpq(5, 2)))


def test_bilinear_box():
    inst = MiqpInstance.build([[0, mpq(1, 2)], [mpq(1, 2), 0]], [0, 0], [], [], 0, [(-1, 1), (-1, 1)])
    sol = solve(inst, mpq(1, 2))
    assert sol.value - (-1) <= mpq(1, 2) * (1 - (-1))


def test_integer_concave():
    inst = MiqpInstance.build([[-1]], [1], [], [], 1, [(0, 1)])
    sol = solve(inst, mpq(1, 4))
    assert sol.value == mpq(0) and inst.objective(sol.x) == 0
    # -(x - 1/2)^2 = -x^2 + x - 1/4; the constant does not change the argmin
    assert sol.x in ((0,), (1,))


def test_infeasible_and_unbounded():
    inst = MiqpInstance.build([[1]], [0], [], [], 1, [(mpq(1, 4), mpq(3, 4))])
    assert solve(inst, 1) is None
    free = MiqpInstance.build([[1]], [0], [[1]], [3], 0)
    with pytest.raises(UnboundedInstanceError):
        solve(free, 1)
    sol = solve(free, 1, psi=2)
    assert -4 <= sol.x[0] <= 3
    with pytest.raises(ValueError):
        solve(inst, 0)


def test_decompose_flat_counts():
    J = MiqpInstance.build([[1]], [0], [], [], 1, [(0, 2)])
    sf = to_spherical_form(J)
    v = (1 / sf.Ly[0, 0],)
    slices = decompose_flat(sf, v, J)
    assert [s.equalities[-1][1] for s in slices] == [0, 1, 2]
    E = MiqpInstance.build([[1]], [0], [], [], 0, [(mpq(1, 4), mpq(3, 4))])
    sf = to_spherical_form(E)
    assert decompose_flat(sf, (1 / sf.Ly[0, 0],), E) == []


def mixed_points(inst):
    """Integer parts of every mixed-integer feasible point (small boxes only)."""
    P = inst.polyhedron()
    ranges = []
    for i in range(inst.p):
        e = [int(i == j) for j in range(inst.n)]
        ranges.append(range(ceil(lp_optimize(P, e, "min").value), floor(lp_optimize(P, e, "max").value) + 1))
    return list(itertools.product(*ranges))


def test_flat_slices_partition_fibers():
    rng = random.Random(81)
    seen = 0
    while seen < 8:
        inst = random_instance(rng, n=rng.randint(2, 3), p=rng.randint(1, 2))
        pre = presolve_full_dim(inst)
        J = pre.instance
        if J.n == 0 or J.H.is_zero() or pre.steps:
            continue
        sf = to_spherical_form(J)
        res = aligned_or_flat(sf)
        if not isinstance(res, Flat):
            continue
        slices = decompose_flat(sf, res.v, J)
        a = sf.Ly.apply(res.v)
        assert not any(a[J.p:])
        for ints in mixed_points(J):
            # the slice functional is integral on every mixed-integer point
            val = dot(a[:J.p], ints)
            assert val.denominator == 1
            fiber = J
            for i, t in enumerate(ints):
                fiber = fiber.with_equality([int(i == j) for j in range(J.n)], t)
            if feasible_point(fiber.polyhedron()) is not None:
                assert sum(1 for s in slices if s.equalities[-1][1] == val) == 1
        seen += 1


def test_corpus_guarantee_and_iteration_bound():
    rng = random.Random(82)
    for _ in range(12):
        inst = random_instance(rng)
        rep = oracle_bracket(inst)
        for eps in (mpq(1), mpq(1, 4)):
            stats = SolveStats()
            sol = solve(inst, eps, stats=stats)
            assert inst.is_feasible(sol.x) and sol.value == inst.objective(sol.x)
            assert check_solution(inst, sol.x, eps, rep) is Verdict.PASS
            assert stats.enqueued <= stats.bound


def test_parallel_jobs_same_answer():
    rng = random.Random(83)
    inst = random_instance(rng, n=3, p=1, k=2)
    assert solve(inst, mpq(1, 2)).x == solve(inst, mpq(1, 2), jobs=2).x
