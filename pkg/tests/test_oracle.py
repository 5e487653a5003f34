import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_instance
from miqpa.instance import MiqpInstance
from miqpa.lp import enumerate_vertices
from miqpa.oracle import OracleLimitError, Verdict, check_solution, oracle_bracket


def test_linear_objective_tight():
    inst = MiqpInstance.build([[0, 0], [0, 0]], [1, -2], [[1, 1]], [1], 0, [(-1, 1), (-1, 1)])
    rep = oracle_bracket(inst)
    vals = [inst.objective(v) for v in enumerate_vertices(inst.polyhedron())]
    assert rep.f_star_lo == rep.f_star_hi == min(vals) == -3
    assert rep.f_max_lo == rep.f_max_hi == max(vals) == 3


def test_square_on_interval():
    rep = oracle_bracket(MiqpInstance.build([[1]], [0], [], [], 0, [(-1, 1)]))
    assert rep.f_star_lo <= 0 <= rep.f_star_hi and rep.f_max_lo <= 1 <= rep.f_max_hi


def test_bilinear_box():
    inst = MiqpInstance.build([[0, mpq(1, 2)], [mpq(1, 2), 0]], [0, 0], [], [], 0, [(-1, 1), (-1, 1)])
    rep = oracle_bracket(inst)
    assert (rep.f_star_lo, rep.f_star_hi, rep.f_max_lo, rep.f_max_hi) == (-1, -1, 1, 1)


def test_interior_critical_point():
    # x^2 - x on [-1, 1]: minimum -1/4 at 1/2, maximum 2 at -1
    rep = oracle_bracket(MiqpInstance.build([[1]], [-1], [], [], 0, [(-1, 1)]))
    assert rep.f_star_lo == mpq(-1, 4) and rep.argmin == (mpq(1, 2),)
    assert rep.f_max_lo == 2 and rep.argmax == (-1,)


def test_limits():
    inst = MiqpInstance.build([[0] * 5] * 5, [0] * 5, [], [], 0, [(0, 1)] * 5)
    with pytest.raises(OracleLimitError):
        oracle_bracket(inst)


def test_verdicts():
    inst = MiqpInstance.build([[1]], [0], [], [], 0, [(-1, 1)])
    rep = oracle_bracket(inst)
    assert check_solution(inst, (0,), mpq(1, 100), rep) is Verdict.PASS
    assert check_solution(inst, (1,), 1, rep) is Verdict.PASS
    assert check_solution(inst, (1,), mpq(1, 2), rep) is Verdict.FAIL
    assert check_solution(inst, (2,), 1, rep) is Verdict.INFEASIBLE
    loose = rep.__class__(mpq(-1, 2), 0, 1, mpq(3, 2), rep.resolution)
    assert check_solution(inst, (mpq(1, 2),), mpq(1, 4), loose) is Verdict.INCONCLUSIVE
    assert rep.with_candidate(mpq(1, 4)).certified_ratio_hi == mpq(1, 4)


def test_fine_grid_agrees():
    rng = random.Random(91)
    for _ in range(15):
        inst = random_instance(rng, n=rng.randint(1, 2), p=0)
        rep = oracle_bracket(inst, mpq(1, 16))
        assert inst.is_feasible(rep.argmin) and inst.objective(rep.argmin) == rep.f_star_lo
        assert inst.is_feasible(rep.argmax) and inst.objective(rep.argmax) == rep.f_max_hi
        assert rep.grid_points > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from([mpq(1, 8), mpq(1, 4), mpq(1, 2), mpq(1)]))
def test_verdict_invariants(seed, eps):
    rng = random.Random(seed)
    inst = random_instance(rng, n=rng.randint(1, 3))
    rep = oracle_bracket(inst, mpq(1, 8))
    finer = oracle_bracket(inst, mpq(1, 16))
    x = rep.argmax
    assert check_solution(inst, x, 1, rep) is Verdict.PASS
    v = check_solution(inst, x, eps, rep)
    if v is Verdict.PASS:
        assert check_solution(inst, x, min(1, 2 * eps), rep) is Verdict.PASS
        assert check_solution(inst, x, eps, finer) is not Verdict.FAIL
    if rep.f_max_lo > rep.f_star_hi and eps < 1:
        assert v is Verdict.FAIL
