"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 solver failure.
Data goes to stdout as CSV; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import math
import sys

from .analysis import DeltaDistribution, monte_carlo, sweep_constant, sweep_grid, welfare_report
from .bargaining import bargaining_set, bargaining_set_csv
from .demand import run_demand_game, transcript_csv
from .expr import EvaluationError
from .model import GameValidationError
from .scenario import ScenarioError, load_scenario
from .solver import SolverError, closed_form_example, solve
from .tabular import fmt, to_csv

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2, 3

SOLUTION_HEADER = (
    "delta1", "delta2", "s1_star", "s2_star", "p1_star", "p2_star", "u1_star", "u2_star", "nash_product", "status",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_range(text: str) -> list:
    """``a:b:step`` -> [a, a+step, ..., b]; closed at both ends.

    The last point is kept (and snapped to b) when within 1e-12 of b.
    """
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected a:b:step") from None
    if not step > 0 or b < a or not all(map(math.isfinite, (a, b, step))):
        raise UsageError(f"bad range {text!r}; need a <= b and step > 0")
    out = []
    i = 0
    while True:
        v = round(a + i * step, 12)
        if abs(v - b) <= 1e-12:
            out.append(b)
            break
        if v > b:
            break
        out.append(v)
        i += 1
    return out


def solution_row(game, sol):
    s = sol.s_star if sol.s_star is not None else (math.nan, math.nan)
    return (*game.deltas, *s, *sol.p_star, *sol.u_star, sol.nash_product, sol.status)


def _scenario_game(args, need_point=True):
    scn = load_scenario(args.scenario)
    game = scn.game
    d1 = getattr(args, "delta1", None)
    d2 = getattr(args, "delta2", None)
    if d1 is not None or d2 is not None:
        if scn.is_template and (d1 is None or d2 is None):
            raise UsageError("scenario has random deltas; give both --delta1 and --delta2")
        game = game.with_deltas(game.player1.delta if d1 is None else d1, game.player2.delta if d2 is None else d2)
    elif need_point and scn.is_template:
        raise UsageError("scenario has random deltas; only 'mc' accepts it (or override with --delta1/--delta2)")
    return scn, game


def _note(sol, err):
    if sol.diagnostics.paper_boundary_claim_mismatch:
        print(
            "note: exactly one delta is 0 yet feasible points strictly dominate the disagreement point "
            "(paper_boundary_claim_mismatch=true)",
            file=err,
        )
    if sol.diagnostics.budget_exhausted:
        print("warning: refinement budget exhausted; returning best point found", file=err)


def cmd_solve(args, out, err):
    scn, game = _scenario_game(args)
    sol = solve(game, scn.options)
    out.write(to_csv(SOLUTION_HEADER, [solution_row(game, sol)]))
    _note(sol, err)


def cmd_example(args, out, err):
    from .model import division_game

    sol = closed_form_example(args.delta1, args.delta2, args.budget)
    game = division_game(args.delta1, args.delta2, args.budget)
    out.write(to_csv(SOLUTION_HEADER, [solution_row(game, sol)]))


def cmd_sweep(args, out, err):
    scn = load_scenario(args.scenario)
    table = sweep_grid(scn.game, parse_range(args.delta1), parse_range(args.delta2), scn.options)
    out.write(table.to_csv())


def cmd_const_sweep(args, out, err):
    scn = load_scenario(args.scenario)
    out.write(sweep_constant(scn.game, parse_range(args.delta), scn.options).to_csv())


def cmd_mc(args, out, err):
    scn = load_scenario(args.scenario)
    if args.n < 1 or args.seed < 0:
        raise UsageError("--n must be >= 1 and --seed >= 0")
    report = monte_carlo(scn.game, scn.dist1, scn.dist2, args.n, args.seed, scn.options)
    out.write(report.to_csv())
    if report.failed_count:
        print(f"warning: {report.failed_count} sample(s) failed and were excluded from summaries", file=err)


def cmd_bset(args, out, err):
    _, game = _scenario_game(args)
    if args.resolution < 2:
        raise UsageError("--resolution must be >= 2")
    bset = bargaining_set(game, args.resolution)
    out.write(bargaining_set_csv(bset))
    out.write(f"# area,{fmt(bset.area)}\n# degenerate,{fmt(bset.is_degenerate)}\n")


def cmd_demand(args, out, err):
    scn, game = _scenario_game(args)
    t = run_demand_game(game, (args.demand1, args.demand2), options=scn.options)
    out.write(transcript_csv([t]))


def cmd_welfare(args, out, err):
    scn, game = _scenario_game(args)
    sol = solve(game, scn.options)
    out.write(welfare_report(game, sol, scn.options).to_csv())


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="deltanash", description="Nash bargaining with rationality-weighted payoffs.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def with_scenario(name, func, help_, deltas=False):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("scenario")
        if deltas:
            sp.add_argument("--delta1", type=float)
            sp.add_argument("--delta2", type=float)
        sp.set_defaults(func=func)
        return sp

    with_scenario("solve", cmd_solve, "solve a scenario; Solution CSV", deltas=True)

    sp = sub.add_parser("example", help="closed-form solution of the fixed-sum division game")
    sp.add_argument("--delta1", type=float, required=True)
    sp.add_argument("--delta2", type=float, required=True)
    sp.add_argument("--budget", type=float, default=100.0)
    sp.set_defaults(func=cmd_example)

    sp = with_scenario("sweep", cmd_sweep, "grid sweep over (delta1, delta2)")
    sp.add_argument("--delta1", required=True, metavar="A:B:STEP")
    sp.add_argument("--delta2", required=True, metavar="A:B:STEP")

    sp = with_scenario("const-sweep", cmd_const_sweep, "sweep a common delta")
    sp.add_argument("--delta", required=True, metavar="A:B:STEP")

    sp = with_scenario("mc", cmd_mc, "Monte Carlo over random deltas")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)

    sp = with_scenario("bset", cmd_bset, "bargaining-set points and area", deltas=True)
    sp.add_argument("--resolution", type=int, default=400)

    sp = with_scenario("demand", cmd_demand, "play the demand game", deltas=True)
    sp.add_argument("--demand1", type=float, required=True)
    sp.add_argument("--demand2", type=float, required=True)

    with_scenario("welfare", cmd_welfare, "welfare report at the solution", deltas=True)
    return p


def run_cli(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args, out, err)
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except (ScenarioError, GameValidationError) as exc:
        print(f"validation error: {exc}", file=err)
        return EXIT_INVALID
    except (EvaluationError, SolverError) as exc:
        print(f"solver failure: {exc}", file=err)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"validation error: {exc}", file=err)
        return EXIT_INVALID
    return EXIT_OK


def main():
    sys.exit(run_cli())
