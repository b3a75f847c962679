import math

import numpy as np
import pytest
from scipy.optimize import minimize, minimize_scalar

from deltanash import (
    FeasiblePolygon,
    GameSpec,
    PlayerSpec,
    Solution,
    SolverOptions,
    VertexOptimum,
    closed_form_example,
    efficient_frontier,
    nash_product,
    payoff,
    solve,
    stationarity_residual,
)
from deltanash.solver import Diagnostics

from conftest import DELTA_GRID, grid_pairs

RASTER = SolverOptions(affine_fast_path=False)

# (0.25, 0.75): s* = (430/7, 270/7), p* = (32.5, 325/14); frozen after the
# budget-line oracle below reproduced them.
S_QUARTER = (61.4285714, 38.5714286)
P_QUARTER = (32.5, 23.2142857)


def budget_line_oracle(d1, d2, budget=100.0):
    """Dense enumeration of s1 on s1 + s2 = budget, then bounded scalar refinement."""

    def neg(s1):
        s2 = budget - s1
        p1 = d1 * s1 + (1 - d1) * (s1 - s2)
        p2 = d2 * s2 + (1 - d2) * (s2 - s1)
        return -(p1 * p2) if p1 >= 0 and p2 >= 0 else 0.0

    xs = np.linspace(0, budget, 200001)
    k = int(np.argmin([neg(x) for x in xs]))
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
    res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    s1 = res.x
    s2 = budget - s1
    return (s1, s2), (d1 * s1 + (1 - d1) * (s1 - s2), d2 * s2 + (1 - d2) * (s2 - s1))


def test_oracle_confirms_frozen_values():
    s, p = budget_line_oracle(0.25, 0.75)
    assert s == pytest.approx(S_QUARTER, abs=1e-6)
    assert p == pytest.approx(P_QUARTER, abs=1e-6)
    assert S_QUARTER == pytest.approx((430 / 7, 270 / 7), abs=1e-7)


@pytest.mark.parametrize(
    "deltas, point, value",
    [((1, 1), (50, 50), 2500), ((1, 1), (100, 0), 0), ((0.5, 0.5), (50, 50), 625)],
)
def test_nash_product(game, deltas, point, value):
    assert nash_product(game(*deltas), *point) == value


def test_full_rationality_even_split(game):
    sol = solve(game(1, 1))
    assert sol.s_star == (50, 50) and sol.p_star == (50, 50)
    assert sol.status == "agreement"


@pytest.mark.parametrize("options", [SolverOptions(), RASTER])
def test_quarter_three_quarter(game, options):
    sol = solve(game(0.25, 0.75), options)
    assert sol.s_star == pytest.approx(S_QUARTER, abs=1e-6)
    assert sol.p_star == pytest.approx(P_QUARTER, abs=1e-6)


@pytest.mark.parametrize("options", [SolverOptions(), RASTER])
def test_both_irrational(game, options):
    sol = solve(game(0, 0), options)
    assert sol.status == "degenerate"
    assert sol.p_star == (0, 0)
    assert sol.nash_product == 0


@pytest.mark.parametrize(
    "deltas, s, p",
    [((1, 1), (50, 50), (50, 50)), ((0.5, 0.5), (50, 50), (25, 25)), ((0.25, 0.75), S_QUARTER, P_QUARTER)],
)
def test_closed_form(deltas, s, p):
    sol = closed_form_example(*deltas, 100)
    assert sol.s_star == pytest.approx(s, abs=1e-7)
    assert sol.p_star == pytest.approx(p, abs=1e-7)
    assert sol.status == "agreement"


def test_closed_form_half_cross_checked_by_raster(game):
    sol = solve(game(0.5, 0.5), RASTER)
    assert sol.s_star == pytest.approx((50, 50), abs=1e-6)
    assert sol.p_star == pytest.approx((25, 25), abs=1e-6)


@pytest.mark.parametrize("deltas", [(0, 1), (1, 0), (0, 0), (-0.1, 0.5), (0.5, 1.2)])
def test_closed_form_domain(deltas):
    with pytest.raises(ValueError):
        closed_form_example(*deltas, 100)


def test_closed_form_scales_with_budget():
    a = closed_form_example(0.3, 0.6, 100)
    b = closed_form_example(0.3, 0.6, 250)
    assert np.allclose(np.array(b.s_star), 2.5 * np.array(a.s_star))
    assert np.allclose(np.array(b.p_star), 2.5 * np.array(a.p_star))


@pytest.mark.parametrize("d1, d2", grid_pairs())
def test_solver_matches_closed_form(game, d1, d2):
    sol = solve(game(d1, d2))
    ref = closed_form_example(d1, d2, 100)
    assert max(abs(a - b) for a, b in zip(sol.s_star + sol.p_star, ref.s_star + ref.p_star)) <= 1e-6
    assert abs(sol.s_star[0] + sol.s_star[1] - 100) <= 1e-6 * 100
    if d1 != d2:
        assert np.sign(sol.s_star[0] - sol.s_star[1]) == np.sign(d2 - d1)


@pytest.mark.parametrize("d1, d2", [(0.1, 0.9), (0.7, 0.2), (1.0, 0.4)])
def test_closed_form_agrees_with_budget_line_oracle(d1, d2):
    s, p = budget_line_oracle(d1, d2)
    ref = closed_form_example(d1, d2)
    assert ref.s_star == pytest.approx(s, abs=1e-6)
    assert ref.p_star == pytest.approx(p, abs=1e-6)


def test_single_zero_delta(game):
    sol = solve(game(0, 1))
    assert sol.p_star == pytest.approx((50, 25))
    assert sol.s_star == pytest.approx((75, 25))
    assert sol.status == "agreement"
    assert sol.diagnostics.paper_boundary_claim_mismatch
    assert not solve(game(0.5, 1)).diagnostics.paper_boundary_claim_mismatch
    assert not solve(game(0, 0)).diagnostics.paper_boundary_claim_mismatch


def _decomposition_ok(game, sol):
    for k, pl in enumerate(game.players):
        if math.isnan(sol.u_star[k]):
            continue
        expected = pl.delta * sol.u_star[k] + (1 - pl.delta) * sol.d_vals[k]
        assert abs(sol.p_star[k] - expected) <= 1e-9 * max(1.0, abs(expected))


@pytest.mark.parametrize("d1, d2", grid_pairs([0.0, 0.3, 0.5, 1.0]))
def test_decomposition_every_solve(game, d1, d2):
    for opts in (SolverOptions(), RASTER):
        g = game(d1, d2)
        sol = solve(g, opts)
        _decomposition_ok(g, sol)
        if sol.status == "agreement":
            d = g.disagreement_point()
            assert sol.nash_product == pytest.approx((sol.p_star[0] - d[0]) * (sol.p_star[1] - d[1]), rel=1e-9)
            assert g.outcome_space.contains(*sol.s_star)


def scaled_game(d1, d2, a, b):
    return GameSpec(
        PlayerSpec(f"{a} * s1 + {b}", f"{a} * (s1 - s2) + {b}", d1),
        PlayerSpec(f"{a} * s2 + {b}", f"{a} * (s2 - s1) + {b}", d2),
        FeasiblePolygon.budget(100),
        disagreement=(b, b),
    )


@pytest.mark.parametrize("d1, d2", [(0.25, 0.75), (0.6, 0.9), (1, 1), (0.1, 0.2)])
@pytest.mark.parametrize("a, b", [(2.0, 7.0), (0.1, -3.0), (13.0, 0.0)])
def test_argmax_affine_invariance(game, d1, d2, a, b):
    base = solve(game(d1, d2))
    moved = solve(scaled_game(d1, d2, a, b))
    assert moved.s_star == pytest.approx(base.s_star, abs=1e-6)
    assert moved.p_star == pytest.approx(tuple(a * p + b for p in base.p_star), rel=1e-9)


def test_argmax_affine_invariance_raster(game):
    base = solve(game(0.25, 0.75), RASTER)
    moved = solve(scaled_game(0.25, 0.75, 3.0, 5.0), RASTER)
    assert moved.s_star == pytest.approx(base.s_star, abs=1e-5)


def random_affine_game(rng, budget=100.0):
    def expr():
        c = [float(x) for x in rng.uniform(-1, 1, 3)]
        return f"{c[0]!r} + {c[1]!r} * s1 + {c[2]!r} * s2"

    return GameSpec(
        PlayerSpec(expr(), expr(), float(rng.uniform())),
        PlayerSpec(expr(), expr(), float(rng.uniform())),
        FeasiblePolygon.budget(budget),
        disagreement=(0.0, 0.0),
    )


def test_grid_dominance_on_random_affine_games():
    rng = np.random.default_rng(5)
    agreements = 0
    for _ in range(50):
        g = random_affine_game(rng)
        sol = solve(g)
        front = efficient_frontier(g.outcome_space, 2001)
        best = 0.0
        for s in front:
            p1, p2 = payoff(g.player1, *s), payoff(g.player2, *s)
            if p1 >= 0 and p2 >= 0:
                best = max(best, p1 * p2)
        scale = max(1.0, abs(best))
        assert sol.nash_product >= best - 1e-8 * scale
        agreements += sol.status == "agreement"
    assert agreements >= 10


@pytest.mark.parametrize("seed", range(8))
def test_player_symmetry(seed):
    rng = np.random.default_rng(100 + seed)
    g = random_affine_game(rng)
    a, b = solve(g), solve(g.swapped())
    assert a.status == b.status
    if a.s_star is not None:
        assert b.s_star == pytest.approx(a.s_star[::-1], abs=1e-6)
    assert b.p_star == pytest.approx(a.p_star[::-1], abs=1e-6)


def test_player_symmetry_division(game):
    a = solve(game(0.2, 0.7))
    b = solve(game(0.2, 0.7).swapped())
    assert b.s_star == pytest.approx(a.s_star[::-1], abs=1e-9)


def test_tie_break_prefers_smallest_s1():
    # p1 = p2 = s1 + s2: every point of the budget line is optimal
    g = GameSpec(PlayerSpec("s1 + s2", "0", 1), PlayerSpec("s1 + s2", "0", 1), FeasiblePolygon.budget(100))
    assert solve(g).s_star == (0, 100)
    assert solve(g, RASTER).s_star == pytest.approx((0, 100), abs=1e-6)


def test_repeat_solves_bit_identical(game):
    for opts in (SolverOptions(), RASTER):
        assert solve(game(0.37, 0.81), opts) == solve(game(0.37, 0.81), opts)


def test_threat_allocation():
    g = GameSpec(PlayerSpec("s1", "s1 - s2", 1), PlayerSpec("s2", "s2 - s1", 1), FeasiblePolygon.budget(100),
                 threats=(20, 10))
    sol = solve(g)
    assert sol.s_star == pytest.approx((55, 45))
    assert sol.diagnostics.disagreement == (20, 10)


def test_infeasible_disagreement_point():
    g = GameSpec(PlayerSpec("s1", "0", 1), PlayerSpec("s2", "0", 1), FeasiblePolygon.budget(100),
                 disagreement=(80, 80))
    sol = solve(g)
    assert sol.status == "disagreement"
    assert sol.s_star is None and sol.p_star == (80, 80)


def test_no_strict_dominance_is_disagreement():
    # player 2 gains nothing anywhere: dominance region is a segment with p2 = d2
    g = GameSpec(PlayerSpec("s1", "0", 1), PlayerSpec("0 * s2", "0", 1), FeasiblePolygon.budget(100), threats=(0, 0))
    sol = solve(g)
    assert sol.status == "disagreement"
    assert sol.s_star == (0, 0)
    assert sol.p_star == (0, 0)


def nonlinear_game():
    return GameSpec(
        PlayerSpec("s1 - s1^2/400", "s1 - min(s2, 60)", 0.7),
        PlayerSpec("2*s2 - s2^2/100", "s2 - abs(s1 - 20)", 0.9),
        FeasiblePolygon(((-1, 0, 0), (0, -1, 0), (1, 1, 100), (1, 0, 80))),
        threats=(10, 10),
    )


def test_nonlinear_matches_scipy_multistart():
    g = nonlinear_game()
    sol = solve(g)
    assert sol.diagnostics.method == "raster-compass"
    assert not sol.diagnostics.budget_exhausted
    poly = g.outcome_space
    cons = [{"type": "ineq", "fun": (lambda x, r=r: r[2] - r[0] * x[0] - r[1] * x[1])} for r in poly.constraints]
    best = -np.inf
    for x0 in [(20, 20), (50, 40), (70, 25), (30, 60), (60, 39)]:
        res = minimize(lambda x: -nash_product(g, *x), x0, constraints=cons, method="SLSQP",
                       options={"ftol": 1e-14, "maxiter": 500})
        if res.success and poly.contains(*res.x, tol=1e-6):
            best = max(best, -res.fun)
    assert sol.nash_product >= best - 1e-6 * abs(best)


def test_refinement_budget_flag(game):
    sol = solve(game(0.25, 0.75), SolverOptions(affine_fast_path=False, max_refinement_steps=2))
    assert sol.diagnostics.budget_exhausted
    assert sol.status == "agreement"


def test_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(grid_resolution=8)
    with pytest.raises(ValueError):
        SolverOptions(refinement_tolerance=0)


def test_stationarity_residual(game):
    assert stationarity_residual(game(1, 1), solve(game(1, 1))) <= 1e-6
    g = game(0.25, 0.75)
    assert stationarity_residual(g, closed_form_example(0.25, 0.75)) <= 1e-6
    off = Solution((60, 40), (60, 40), (60, 40), (20, -20), 2400, "agreement", Diagnostics("manual"))
    assert stationarity_residual(game(1, 1), off) > 1e-3


def test_stationarity_at_vertex_raises():
    # optimum pinned to the corner (80, 20) by the s1 <= 80 cap
    g = GameSpec(PlayerSpec("s1", "0", 1), PlayerSpec("s2 + 200", "0", 1),
                 FeasiblePolygon(((-1, 0, 0), (0, -1, 0), (1, 1, 100), (1, 0, 80))))
    sol = solve(g)
    assert sol.s_star == pytest.approx((80, 20))
    assert sol.diagnostics.stationarity_residual is None
    with pytest.raises(VertexOptimum):
        stationarity_residual(g, sol)
