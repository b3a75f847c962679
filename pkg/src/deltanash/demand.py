"""The four-stage demand game: threats, announcement, demands, payoffs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import GameSpec, payoff, payoff_array
from .polygon import region_vertices
from .solver import TIE_TOL, SolverOptions, _raster, affine_payoffs, pattern_search, solve
from .tabular import to_csv

TRANSCRIPT_HEADER = ("t_payoff1", "t_payoff2", "q1", "q2", "compatible", "final1", "final2")


class Compatibility(NamedTuple):
    compatible: bool
    witness: tuple | None  # payoff point meeting both demands
    allocation: tuple | None  # allocation producing the witness


@dataclass(frozen=True)
class DemandGameTranscript:
    threats: tuple | None  # threat allocation, if threats were given as one
    threat_payoffs: tuple
    announced: bool
    demands: tuple
    compatible: bool
    final_payoffs: tuple
    witness: tuple | None

    def csv_row(self):
        return (*self.threat_payoffs, *self.demands, self.compatible, *self.final_payoffs)


def nash_demands(game: GameSpec, options: SolverOptions | None = None) -> tuple:
    """Demands each player announces on their own payoff scale: the solver's p*."""
    return solve(game, options).p_star


def demands_compatible(
    game: GameSpec, q1: float, q2: float, resolution: int = 400, options: SolverOptions | None = None
) -> Compatibility:
    """Is there a feasible allocation giving p1 >= q1 and p2 >= q2 (with eps slack)?

    Affine payoffs are decided exactly; otherwise the best raster point for
    min(p1 - q1, p2 - q2) is refined by pattern search.  ``options``, when
    given, overrides ``resolution``.
    """
    poly = game.outcome_space
    eps = poly.tolerance
    lin = affine_payoffs(game)
    if lin is not None:
        (c1, a11, a12), (c2, a21, a22) = lin
        verts = region_vertices(
            list(poly.constraints) + [(-a11, -a12, c1 - q1 + eps)], poly.tolerance, poly.scale
        )
        if not verts:
            return Compatibility(False, None, None)
        # max of p2 over the polygon is at a vertex; smallest s1 breaks ties
        best = max(verts, key=lambda v: (c2 + a21 * v[0] + a22 * v[1], -v[0], -v[1]))
        w = (payoff(game.player1, *best), payoff(game.player2, *best))
        if w[1] >= q2 - eps:
            return Compatibility(True, w, tuple(best))
        return Compatibility(False, None, None)

    # raster for a start point, then pattern search on the worse-off margin
    opts = options or SolverOptions(grid_resolution=resolution)
    S1, S2, step = _raster(poly, opts.grid_resolution)
    V = np.array(poly.vertices)
    S1 = np.concatenate([S1, V[:, 0]])
    S2 = np.concatenate([S2, V[:, 1]])
    H = np.minimum(payoff_array(game.player1, S1, S2) - q1, payoff_array(game.player2, S1, S2) - q2)
    best = H.max()
    tied = np.flatnonzero(H >= best - TIE_TOL * max(1.0, abs(best)))
    k = tied[np.lexsort((S2[tied], S1[tied]))[0]]

    def margin(s):
        if not poly.contains(s[0], s[1]):
            return -math.inf
        return min(payoff(game.player1, *s) - q1, payoff(game.player2, *s) - q2)

    x, h, _, _ = pattern_search(poly, margin, (float(S1[k]), float(S2[k])), step, opts)
    if h < -eps:
        return Compatibility(False, None, None)
    return Compatibility(True, (payoff(game.player1, *x), payoff(game.player2, *x)), x)


def run_demand_game(
    game: GameSpec,
    demands: tuple,
    *,
    threats: tuple | None = None,
    threat_payoffs: tuple | None = None,
    options: SolverOptions | None = None,
) -> DemandGameTranscript:
    """Play one round of the demand game.

    Threats are exogenous: pass an allocation (``threats``), an explicit
    payoff pair (``threat_payoffs``), or neither to use the game's own
    disagreement specification.
    """
    options = options or SolverOptions()
    if threats is not None and threat_payoffs is not None:
        raise ValueError("give threats or threat_payoffs, not both")

    # stage one: threats are fixed
    if threats is not None:
        threats = (float(threats[0]), float(threats[1]))
        if not game.outcome_space.contains(*threats):
            raise ValueError(f"threat allocation {threats} is outside the outcome space")
        fallback = (payoff(game.player1, *threats), payoff(game.player2, *threats))
    elif threat_payoffs is not None:
        fallback = (float(threat_payoffs[0]), float(threat_payoffs[1]))
    else:
        threats = game.threats
        fallback = tuple(game.disagreement_point())

    # stage two: announcement carries no computation
    announced = True

    # stage three: demands
    q = (float(demands[0]), float(demands[1]))

    # stage four: payoffs
    check = demands_compatible(game, q[0], q[1], options=options)
    final = q if check.compatible else fallback
    return DemandGameTranscript(
        threats=threats,
        threat_payoffs=fallback,
        announced=announced,
        demands=q,
        compatible=check.compatible,
        final_payoffs=final,
        witness=check.witness,
    )


def transcript_csv(transcripts) -> str:
    return to_csv(TRANSCRIPT_HEADER, (t.csv_row() for t in transcripts))
