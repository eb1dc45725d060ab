"""Command-line interface: ``avemap {solve,bench,analyze,generate}``.

Exit codes: 0 on success (for ``solve``, only when the run converged), 1
when a solve ends without converging, 2 on unreadable input or bad
configuration, 3 when the problem violates a solver's preconditions.
"""

import argparse
import logging
import sys

import numpy as np

from . import analysis
from .bench import campaign_from_mapping, load_campaign, rows_to_csv, rows_to_markdown, run_campaign
from .core import read_problem, write_problem
from .exceptions import BadShape, CampaignConfigError, ProblemFormatError
from .generators import GenConfig
from .solvers import SOLVERS, SolverConfig, Status, solve

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_INPUT = 2
EXIT_PRECONDITION = 3


def _add_solver_flags(parser, with_solver=True):
    if with_solver:
        parser.add_argument("--solver", choices=sorted(SOLVERS), default="map")
    parser.add_argument("--eps", type=float, help="residual tolerance (default 1e-6)")
    parser.add_argument("--max-iter", type=int, dest="max_iter")
    parser.add_argument("--gamma", type=float, help="relaxation parameter in (0, 1)")
    parser.add_argument("--N", type=int, dest="N", help="MAP-LS phase-one cap")
    parser.add_argument("--delta", type=float, help="MAP-LS switch threshold")
    parser.add_argument("--tie", choices=("u", "v"))


def _solver_overrides(args):
    keys = ("eps", "max_iter", "gamma", "N", "delta", "tie")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _config_from_args(args):
    o = _solver_overrides(args)
    names = {"eps": "epsilon", "max_iter": "max_iter", "gamma": "gamma", "N": "switch_N",
             "delta": "switch_delta", "tie": "tie_rule"}
    return SolverConfig(**{names[k]: v for k, v in o.items()})


def _vec(v):
    return " ".join(f"{x:.17g}" for x in v)


def cmd_solve(args):
    problem = read_problem(args.file)
    cfg = _config_from_args(args)
    rep = solve(problem, args.solver, cfg)
    print(f"solver: {rep.solver}")
    print(f"status: {rep.status.value}")
    print(f"iterations: {rep.iterations}")
    if rep.phase_iters is not None:
        print(f"phase_iters: {rep.phase_iters[0]} {rep.phase_iters[1]}")
    print(f"residual: {rep.final_residual:.6g}")
    print(f"time_s: {rep.wallclock:.6g}")
    if rep.message:
        print(f"message: {rep.message}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(_vec(rep.x) + "\n")
    else:
        print(f"x: {_vec(rep.x)}")
    return EXIT_OK if rep.status is Status.CONVERGED else EXIT_NOT_CONVERGED


def cmd_bench(args):
    overrides = _solver_overrides(args)
    for key in ("trials", "seed", "out", "jobs"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    if args.solver:
        overrides["solvers"] = ",".join(args.solver)
    overrides = {k: str(v) for k, v in overrides.items()}
    if args.config:
        campaign = load_campaign(args.config, overrides)
    else:
        campaign = campaign_from_mapping(overrides)
    rows = run_campaign(campaign)
    text = rows_to_markdown(rows) if args.markdown else rows_to_csv(rows)
    if campaign.out_path:
        with open(campaign.out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_analyze(args):
    problem = read_problem(args.file)
    print(f"shape: {problem.m} x {problem.n}")
    print(f"sv_gap: {analysis.sv_gap(problem.A, problem.B):.6g}")
    if problem.m != problem.n:
        print("Q undefined for a rectangular problem")
        return EXIT_OK
    rep = analysis.analyze(problem, cap=args.cap)
    print(f"nondegenerate: {rep.nondegenerate.value}")
    print(f"p_matrix: {rep.p_matrix.value}")
    print(f"unique_solution_certified: {str(rep.unique_solution_certified).lower()}")
    if rep.Q is not None and problem.n <= 8:
        with np.printoptions(precision=6, suppress=True):
            print("Q:")
            print(rep.Q)
    print(rep.summary())
    return EXIT_OK


def cmd_generate(args):
    gen_cfg = GenConfig(args.family, args.n, m=args.m, alpha=args.alpha, seed=args.seed)
    inst = gen_cfg.generate(args.trial)
    write_problem(inst.problem, args.out)
    if args.x_out:
        with open(args.x_out, "w") as fh:
            fh.write(_vec(inst.x_star) + "\n")
    print(f"wrote {args.out} ({inst.problem.m} x {inst.problem.n}, {gen_cfg.family.value})")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="avemap",
        description="Solve and analyze absolute value equations by alternating projections.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log one line per trial")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a problem file")
    p.add_argument("file")
    _add_solver_flags(p)
    p.add_argument("--out", help="write x here instead of printing it")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a benchmark campaign")
    p.add_argument("config", nargs="?", help="key = value campaign file")
    _add_solver_flags(p, with_solver=False)
    p.add_argument("--solver", action="append", choices=sorted(SOLVERS),
                   help="solver to include (repeatable); overrides the config list")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    p.add_argument("--markdown", action="store_true", help="emit a Markdown table")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("analyze", help="structural report for a problem file")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=analysis.DEFAULT_MINOR_CAP,
                   help="largest n for exhaustive minor checks")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", help="write a random instance")
    p.add_argument("--family", choices=("example1", "example2", "example3"), default="example1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--alpha", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--x-out", dest="x_out", help="also write the planted solution")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except BadShape as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ProblemFormatError, CampaignConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
