"""Command line interface.

Exit codes: 0 success or PASS, 1 infeasible or FAIL, 2 INCONCLUSIVE,
3 input error.  ``MIQPA_LOG`` sets the logging level (e.g. ``DEBUG``).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .instance import Solution
from .io import InstanceFormatError, load_instance, load_solution, save_solution
from .lp import InfeasibleError
from .oracle import DEFAULT_RESOLUTION, OracleLimitError, Verdict, check_solution, oracle_bracket
from .presolve import presolve_full_dim
from .rational import fmt, rat
from .solver import SolveStats, UnboundedInstanceError, with_box, solve
from .spherical import Aligned, aligned_or_flat, to_spherical_form

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3
VERDICT_CODES = {
    Verdict.PASS: EXIT_OK,
    Verdict.FAIL: EXIT_FAIL,
    Verdict.INFEASIBLE: EXIT_FAIL,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


def _rational_arg(text: str):
    try:
        return rat(text)
    except (TypeError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="miqpa", description="Exact epsilon-approximate MIQP solver.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="compute an epsilon-approximate solution")
    s.add_argument("--input", required=True)
    s.add_argument("--epsilon", required=True, type=_rational_arg)
    s.add_argument("--psi", type=int, default=None, help="restrict every variable to [-2^psi, 2^psi]")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--output", required=True)

    c = sub.add_parser("check", help="verify a solution against the brute-force oracle")
    c.add_argument("--input", required=True)
    c.add_argument("--solution", required=True)
    c.add_argument("--epsilon", required=True, type=_rational_arg)
    c.add_argument("--resolution", type=_rational_arg, default=DEFAULT_RESOLUTION)

    o = sub.add_parser("oracle", help="bracket the optimum and the maximum")
    o.add_argument("--input", required=True)
    o.add_argument("--resolution", type=_rational_arg, default=DEFAULT_RESOLUTION)

    d = sub.add_parser("decompose-demo", help="print the spherical form and the branch taken")
    d.add_argument("--input", required=True)
    return ap


def _cmd_solve(args) -> int:
    inst, psi = load_instance(args.input)
    if args.psi is not None:
        psi = args.psi
    if not (0 < args.epsilon <= 1):
        raise InstanceFormatError("epsilon must lie in (0, 1]")
    stats = SolveStats()
    sol = solve(inst, args.epsilon, psi=psi, jobs=max(1, args.jobs), stats=stats)
    if sol is None:
        print("infeasible")
        return EXIT_FAIL
    sol = Solution(sol.x, sol.value,
                   sol.provenance + (f"instances enqueued {stats.enqueued} (bound {fmt(stats.bound)})",),
                   sol.certificates)
    save_solution(sol, args.output)
    print(f"value {fmt(sol.value)}")
    print("x " + " ".join(fmt(v) for v in sol.x))
    return EXIT_OK


def _cmd_check(args) -> int:
    inst, psi = load_instance(args.input)
    inst = with_box(inst, psi)
    sol = load_solution(args.solution)
    if len(sol.x) != inst.n:
        raise InstanceFormatError(f"solution has {len(sol.x)} entries, instance has {inst.n}")
    report = oracle_bracket(inst, args.resolution)
    if not report.feasible:
        print("instance is infeasible")
        return EXIT_FAIL
    verdict = check_solution(inst, sol.x, args.epsilon, report)
    if verdict is not Verdict.INFEASIBLE:
        report = report.with_candidate(inst.objective(sol.x))
        print(f"f(x) {fmt(report.candidate_value)}")
        print(f"certified ratio <= {fmt(report.certified_ratio_hi)}")
    print(verdict.value)
    return VERDICT_CODES[verdict]


def _cmd_oracle(args) -> int:
    inst, psi = load_instance(args.input)
    report = oracle_bracket(with_box(inst, psi), args.resolution)
    if not report.feasible:
        print("infeasible")
        return EXIT_FAIL
    print(f"f_star in [{fmt(report.f_star_lo)}, {fmt(report.f_star_hi)}]")
    print(f"f_max in [{fmt(report.f_max_lo)}, {fmt(report.f_max_hi)}]")
    print("argmin " + " ".join(fmt(v) for v in report.argmin))
    print("argmax " + " ".join(fmt(v) for v in report.argmax))
    print(f"grid points checked {report.grid_points}")
    return EXIT_OK


def _cmd_decompose(args) -> int:
    inst, psi = load_instance(args.input)
    pre = presolve_full_dim(with_box(inst, psi))
    for step in pre.steps:
        print(step)
    J = pre.instance
    if J.n == 0 or J.H.is_zero():
        print("no quadratic part after presolve: solved as a MILP")
        return EXIT_OK
    sf = to_spherical_form(J)
    print(f"d {sf.d}  k {sf.k}  p {sf.p}  r_d {sf.r_d}")
    print("D " + " ".join(fmt(v) for v in sf.D))
    print("c " + " ".join(fmt(v) for v in sf.c))
    print("l " + " ".join(fmt(v) for v in sf.l))
    print("a " + " ".join(fmt(v) for v in sf.a))
    for i, col in enumerate(sf.lattice.B.columns()):
        print(f"b{i + 1} " + " ".join(fmt(v) for v in col))
    print(f"B(a,1) inside proj_y P: {sf.inner_certified()}")
    if sf.x_polytope.dim <= 6:
        print(f"proj_y P inside B(a,r_d): {sf.outer_certified()}")
    branch = aligned_or_flat(sf)
    if isinstance(branch, Aligned):
        print("branch aligned")
        print("y+ " + " ".join(fmt(v) for v in branch.pair.y_plus))
        print("y- " + " ".join(fmt(v) for v in branch.pair.y_minus))
    else:
        print("branch flat")
        print("v " + " ".join(fmt(v) for v in branch.v))
    return EXIT_OK


COMMANDS = {"solve": _cmd_solve, "check": _cmd_check, "oracle": _cmd_oracle, "decompose-demo": _cmd_decompose}


def main(argv=None) -> int:
    level = os.environ.get("MIQPA_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}")
        return EXIT_FAIL
    except (InstanceFormatError, UnboundedInstanceError, OracleLimitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
