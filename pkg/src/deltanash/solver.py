"""Nash-product maximisation for rationality-weighted bargaining games.

Two routes:

* affine payoffs: the dominance region {s feasible, p(s) >= d} is itself a
  polygon, the Nash product restricted to any of its edges is a quadratic in
  the edge parameter, and the maximum is attained on the boundary. Each edge
  is solved in closed form.
* anything else: best point of a raster, then a pattern search whose
  directions include the polygon edge directions (so it can slide along
  active constraints), halving the step down to the refinement tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .expr import Expr, affine_coefficients, eval_value_expr
from .model import GameSpec, PlayerSpec, payoff_array
from .polygon import FeasiblePolygon, region_vertices

AGREEMENT = "agreement"
DISAGREEMENT = "disagreement"
DEGENERATE = "degenerate"

TIE_TOL = 1e-12
AFFINE_CHECK_POINTS = 20


class SolverError(RuntimeError):
    pass


class VertexOptimum(ValueError):
    """Stationarity along an edge is undefined at a polygon vertex."""


@dataclass(frozen=True)
class SolverOptions:
    grid_resolution: int = 400
    refinement_tolerance: float | None = None  # None -> 1e-9 * polygon scale
    max_refinement_steps: int = 200
    affine_fast_path: bool = True

    def __post_init__(self):
        if int(self.grid_resolution) != self.grid_resolution or self.grid_resolution < 16:
            raise ValueError("grid_resolution must be an integer >= 16")
        if self.refinement_tolerance is not None and not self.refinement_tolerance > 0:
            raise ValueError("refinement_tolerance must be positive")
        if self.max_refinement_steps < 1:
            raise ValueError("max_refinement_steps must be positive")

    def tolerance_for(self, poly: FeasiblePolygon) -> float:
        if self.refinement_tolerance is not None:
            return self.refinement_tolerance
        return 1e-9 * poly.scale


@dataclass(frozen=True)
class Diagnostics:
    method: str
    stationarity_residual: float | None = None
    refinement_steps: int = 0
    budget_exhausted: bool = False
    paper_boundary_claim_mismatch: bool = False
    disagreement: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class Solution:
    s_star: tuple | None
    p_star: tuple
    u_star: tuple
    d_vals: tuple
    nash_product: float
    status: str
    diagnostics: Diagnostics = field(default_factory=lambda: Diagnostics("none"))


# ---------------------------------------------------------------- affine detection


@lru_cache(maxsize=4096)
def _confirmed_affine(expr: Expr, poly: FeasiblePolygon):
    coef = affine_coefficients(expr)
    if coef is None:
        return None
    verts = np.array(poly.vertices)
    rng = np.random.default_rng(20240611)
    w = rng.dirichlet(np.ones(len(verts)), size=AFFINE_CHECK_POINTS)
    pts = w @ verts
    for s1, s2 in pts:
        v = eval_value_expr(expr, float(s1), float(s2))
        lin = coef[0] + coef[1] * s1 + coef[2] * s2
        if abs(v - lin) > 1e-9 * max(1.0, abs(v)):
            return None
    return coef


def composed_affine(player: PlayerSpec, poly: FeasiblePolygon):
    """Coefficients (c0, c1, c2) of the player's payoff, or None if not affine."""
    u = _confirmed_affine(player.rational_value, poly)
    if u is None:
        return None
    d = _confirmed_affine(player.distortion_value, poly)
    if d is None:
        return None
    w = player.delta
    return tuple(w * a + (1.0 - w) * b for a, b in zip(u, d))


def affine_payoffs(game: GameSpec):
    l1 = composed_affine(game.player1, game.outcome_space)
    l2 = composed_affine(game.player2, game.outcome_space)
    if l1 is None or l2 is None:
        return None
    return l1, l2


# ---------------------------------------------------------------- objective


def nash_product(game: GameSpec, s1: float, s2: float) -> float:
    """(p1 - d1) * (p2 - d2) at the allocation (s1, s2)."""
    d1, d2 = game.disagreement_point()
    p1 = _payoff(game.player1, s1, s2)
    p2 = _payoff(game.player2, s1, s2)
    return (p1 - d1) * (p2 - d2)


def _payoff(player, s1, s2):
    u = eval_value_expr(player.rational_value, s1, s2)
    d = eval_value_expr(player.distortion_value, s1, s2)
    return player.delta * u + (1.0 - player.delta) * d


def _evaluate_at(game: GameSpec, s):
    if s is None:
        nan = (math.nan, math.nan)
        return nan, nan, nan
    s1, s2 = s
    u = tuple(eval_value_expr(p.rational_value, s1, s2) for p in game.players)
    dv = tuple(eval_value_expr(p.distortion_value, s1, s2) for p in game.players)
    p = tuple(pl.delta * ui + (1.0 - pl.delta) * di for pl, ui, di in zip(game.players, u, dv))
    return u, dv, p


def _pick(candidates):
    """Best (value, s) with ties within TIE_TOL broken by smallest s1, then s2."""
    best = max(v for v, _ in candidates)
    tied = [s for v, s in candidates if v >= best - TIE_TOL * max(1.0, abs(best))]
    return best, min(tied)


def _boundary_flag(game, set_nontrivial):
    zeros = sum(1 for x in game.deltas if x == 0.0)
    return zeros == 1 and set_nontrivial


# ---------------------------------------------------------------- solve


def solve(game: GameSpec, options: SolverOptions | None = None) -> Solution:
    """Maximise the Nash product over feasible allocations dominating the disagreement point."""
    options = options or SolverOptions()
    lin = affine_payoffs(game) if options.affine_fast_path else None
    if lin is not None:
        return _solve_affine(game, lin, options)
    return _solve_raster(game, options)


def _finish(game, s, status, diag_kwargs):
    d = game.disagreement_point()
    u, dv, p = _evaluate_at(game, s)
    if s is None:
        p = d
    prod = (p[0] - d[0]) * (p[1] - d[1]) if status == AGREEMENT else 0.0
    diag = Diagnostics(disagreement=tuple(d), **diag_kwargs)
    sol = Solution(
        s_star=None if s is None else (float(s[0]) + 0.0, float(s[1]) + 0.0),
        p_star=tuple(float(x) + 0.0 for x in p),
        u_star=tuple(float(x) + 0.0 for x in u),
        d_vals=tuple(float(x) + 0.0 for x in dv),
        nash_product=float(prod),
        status=status,
        diagnostics=diag,
    )
    if status != AGREEMENT:
        return sol
    try:
        resid = stationarity_residual(game, sol)
    except VertexOptimum:
        resid = None
    return _with_residual(sol, resid)


def dominance_region(game: GameSpec, lin=None):
    """Vertices of {s feasible : p(s) >= d} for affine payoffs."""
    poly = game.outcome_space
    lin = lin or affine_payoffs(game)
    if lin is None:
        raise ValueError("dominance_region needs affine payoffs")
    d = game.disagreement_point()
    cons = list(poly.constraints)
    for (c, a1, a2), di in zip(lin, d):
        cons.append((-a1, -a2, c - di))
    return region_vertices(cons, poly.tolerance, poly.scale)


def _solve_affine(game: GameSpec, lin, options: SolverOptions) -> Solution:
    poly = game.outcome_space
    eps = poly.tolerance
    d = game.disagreement_point()
    (c1, a11, a12), (c2, a21, a22) = lin

    def gaps(s):
        return (c1 + a11 * s[0] + a12 * s[1] - d[0], c2 + a21 * s[0] + a22 * s[1] - d[1])

    verts = dominance_region(game, lin)
    fallback = tuple(game.threats) if game.threats is not None else None
    if not verts:
        return _finish(game, fallback, DISAGREEMENT, dict(method="affine-edges"))

    images = [gaps(v) for v in verts]
    if all(abs(g[0]) <= eps and abs(g[1]) <= eps for g in images):
        s = fallback if fallback is not None else min(verts)
        return _finish(game, s, DEGENERATE, dict(method="affine-edges"))

    candidates = [(g[0] * g[1], tuple(v)) for g, v in zip(images, verts)]
    if len(verts) == 2:
        edges = [(verts[0], verts[1])]
    else:
        edges = [(verts[k], verts[(k + 1) % len(verts)]) for k in range(len(verts))]
    for p, q in edges:
        gp, gq = gaps(p), gaps(q)
        b1, b2 = gq[0] - gp[0], gq[1] - gp[1]
        # f(t) = (gp0 + b1 t)(gp1 + b2 t) = gp0 gp1 + (gp0 b2 + b1 gp1) t + b1 b2 t^2
        curv = b1 * b2
        if curv < 0:
            t = -(gp[0] * b2 + b1 * gp[1]) / (2.0 * curv)
            if 0.0 < t < 1.0:
                s = (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))
                g = gaps(s)
                candidates.append((g[0] * g[1], s))

    _, best = _pick(candidates)
    g = gaps(best)
    flag = _boundary_flag(game, True)
    if g[0] > eps and g[1] > eps:
        return _finish(game, best, AGREEMENT, dict(method="affine-edges", paper_boundary_claim_mismatch=flag))
    return _finish(game, fallback, DISAGREEMENT, dict(method="affine-edges", paper_boundary_claim_mismatch=flag))


def _with_residual(sol: Solution, resid):
    diag = sol.diagnostics
    new = Diagnostics(
        method=diag.method,
        stationarity_residual=resid,
        refinement_steps=diag.refinement_steps,
        budget_exhausted=diag.budget_exhausted,
        paper_boundary_claim_mismatch=diag.paper_boundary_claim_mismatch,
        disagreement=diag.disagreement,
    )
    return Solution(sol.s_star, sol.p_star, sol.u_star, sol.d_vals, sol.nash_product, sol.status, new)


def _raster(poly: FeasiblePolygon, resolution: int):
    lo1, hi1, lo2, hi2 = poly.bounding_box()
    g1 = np.linspace(lo1, hi1, resolution)
    g2 = np.linspace(lo2, hi2, resolution)
    S1, S2 = np.meshgrid(g1, g2, indexing="ij")
    S1, S2 = S1.ravel(), S2.ravel()
    keep = poly.contains(S1, S2)
    step = max(hi1 - lo1, hi2 - lo2) / (resolution - 1)
    return S1[keep], S2[keep], step


def pattern_search(poly: FeasiblePolygon, f, x, step, options: SolverOptions):
    """Maximise ``f`` from ``x`` by polling +-axes, diagonals, and +-polygon
    edge tangents and normals.

    The step halves whenever no poll improves; stops below the refinement
    tolerance or after ``max_refinement_steps`` polls.  Returns
    (x, f(x), steps, budget_exhausted).
    """
    r = math.sqrt(0.5)
    directions = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (r, r), (-r, -r), (r, -r), (-r, r)]
    verts = poly.vertices
    for k in range(len(verts)):
        p, q = verts[k], verts[(k + 1) % len(verts)]
        n = math.dist(p, q)
        if n > 0:
            u = ((q[0] - p[0]) / n, (q[1] - p[1]) / n)
            directions += [u, (-u[0], -u[1]), (u[1], -u[0]), (-u[1], u[0])]

    tol = options.tolerance_for(poly)
    fx = f(x)
    steps = 0
    exhausted = False
    while step >= tol:
        if steps >= options.max_refinement_steps:
            exhausted = True
            break
        steps += 1
        trial = [(x[0] + step * u[0], x[1] + step * u[1]) for u in directions]
        fbest, sbest = max(((f(s), s) for s in trial), key=lambda t: t[0])
        if fbest > fx:
            x, fx = sbest, fbest
        else:
            step /= 2.0
    return x, fx, steps, exhausted


def _solve_raster(game: GameSpec, options: SolverOptions) -> Solution:
    poly = game.outcome_space
    eps = poly.tolerance
    d = game.disagreement_point()
    fallback = tuple(game.threats) if game.threats is not None else None
    S1, S2, step = _raster(poly, options.grid_resolution)
    # vertices are always candidates; rasters can miss corners by rounding
    V = np.array(poly.vertices)
    S1 = np.concatenate([S1, V[:, 0]])
    S2 = np.concatenate([S2, V[:, 1]])
    G1 = payoff_array(game.player1, S1, S2) - d[0]
    G2 = payoff_array(game.player2, S1, S2) - d[1]
    dom = (G1 >= -eps) & (G2 >= -eps)
    if not dom.any():
        return _finish(game, fallback, DISAGREEMENT, dict(method="raster-compass"))
    near = (np.abs(G1) <= eps) & (np.abs(G2) <= eps)
    if np.all(near[dom]):
        if fallback is not None:
            s = fallback
        else:
            idx = np.flatnonzero(dom)
            k = idx[np.lexsort((S2[idx], S1[idx]))[0]]
            s = (float(S1[k]), float(S2[k]))
        return _finish(game, s, DEGENERATE, dict(method="raster-compass"))

    prod = np.where(dom, G1 * G2, -np.inf)
    best = prod.max()
    tied = np.flatnonzero(prod >= best - TIE_TOL * max(1.0, abs(best)))
    k = tied[np.lexsort((S2[tied], S1[tied]))[0]]
    x = (float(S1[k]), float(S2[k]))

    def f(s):
        if not poly.contains(s[0], s[1]):
            return -math.inf
        g1 = _payoff(game.player1, s[0], s[1]) - d[0]
        g2 = _payoff(game.player2, s[0], s[1]) - d[1]
        if g1 < -eps or g2 < -eps:
            return -math.inf
        return g1 * g2

    x, fx, steps, exhausted = pattern_search(poly, f, x, step, options)

    g1 = _payoff(game.player1, *x) - d[0]
    g2 = _payoff(game.player2, *x) - d[1]
    flag = _boundary_flag(game, True)
    diag = dict(method="raster-compass", refinement_steps=steps, budget_exhausted=exhausted,
                paper_boundary_claim_mismatch=flag)
    if g1 > eps and g2 > eps:
        return _finish(game, x, AGREEMENT, diag)
    return _finish(game, fallback, DISAGREEMENT, diag)


# ---------------------------------------------------------------- closed form


def closed_form_example(delta1: float, delta2: float, budget: float = 100.0) -> Solution:
    """Closed-form solution of the fixed-sum division game with envy distortions.

    Valid for 0 < delta <= 1 (both players); raises ValueError otherwise.
    """
    if not (0.0 < delta1 <= 1.0 and 0.0 < delta2 <= 1.0):
        raise ValueError("closed form requires 0 < delta1, delta2 <= 1")
    if not budget > 0:
        raise ValueError("budget must be positive")
    half = budget / 2.0
    k = delta1 + delta2 - delta1 * delta2
    p1 = half * k / (2.0 - delta2)
    p2 = half * k / (2.0 - delta1)
    shared = half * k / ((2.0 - delta1) * (2.0 - delta2))
    s1 = budget * (1.0 - delta1) / (2.0 - delta1) + shared
    s2 = budget * (1.0 - delta2) / (2.0 - delta2) + shared
    return Solution(
        s_star=(s1, s2),
        p_star=(p1, p2),
        u_star=(s1, s2),
        d_vals=(s1 - s2, s2 - s1),
        nash_product=p1 * p2,
        status=AGREEMENT,
        diagnostics=Diagnostics(method="closed-form"),
    )


# ---------------------------------------------------------------- first-order check


def stationarity_residual(game: GameSpec, sol: Solution, step: float | None = None) -> float:
    """|d/dt log Nash product| along the active polygon edge at s*.

    Central difference with step 1e-5 * polygon scale by default. Raises
    VertexOptimum when two or more constraints are active at s*. For an
    interior point the norm of the finite-difference gradient is returned.
    """
    if sol.s_star is None or sol.status != AGREEMENT:
        raise ValueError("stationarity is only defined for an agreement solution")
    poly = game.outcome_space
    h = step if step is not None else 1e-5 * poly.scale
    s = sol.s_star
    active = []
    for a1, a2, b in poly.constraints:
        n = math.hypot(a1, a2)
        if n > 0 and abs(a1 * s[0] + a2 * s[1] - b) <= 1e-7 * poly.scale * n:
            active.append((a1 / n, a2 / n))
    if len(active) >= 2:
        raise VertexOptimum(f"s* = {s} is a polygon vertex")

    def logf(x):
        v = nash_product(game, x[0], x[1])
        return math.log(v) if v > 0 else -math.inf

    def deriv(u):
        hi = logf((s[0] + h * u[0], s[1] + h * u[1]))
        lo = logf((s[0] - h * u[0], s[1] - h * u[1]))
        if not (math.isfinite(hi) and math.isfinite(lo)):
            return math.inf
        return (hi - lo) / (2.0 * h)

    if active:
        n1, n2 = active[0]
        return abs(deriv((-n2, n1)))
    return math.hypot(deriv((1.0, 0.0)), deriv((0.0, 1.0)))
