"""Comparative statics over the rationality indices, random indices, and welfare."""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Mapping, Sequence

import numpy as np

from .bargaining import bargaining_area
from .expr import EvaluationError
from .model import GameSpec, GameValidationError
from .solver import DEGENERATE, DISAGREEMENT, Solution, SolverError, SolverOptions, solve
from .tabular import fmt, to_csv

FAILED = "failed"
QUANTILES = (0.05, 0.25, 0.50, 0.75, 0.95)

SWEEP_HEADER = (
    "delta1", "delta2", "s1_star", "s2_star", "p1_star", "p2_star", "u1_star", "u2_star",
    "bargaining_area", "status",
)
MC_HEADER = (
    "draw", "delta1", "delta2", "s1_star", "s2_star", "p1_star", "p2_star", "u1_star", "u2_star", "status",
)
MC_QUANTITIES = MC_HEADER[1:-1]
WELFARE_HEADER = (
    "player", "behavioral_payoff", "rational_value", "distortion_value", "decomposition_residual", "welfare_gap",
)

_STD_NORMAL = NormalDist()
_TINY = 5e-324


# ---------------------------------------------------------------- distributions


@dataclass(frozen=True)
class DeltaDistribution:
    """Distribution of a rationality index, supported on [0, 1].

    kinds and params: point (v,), uniform (a, b), truncated_gaussian
    (mu, sigma), beta (alpha, beta).
    """

    kind: str
    params: tuple

    def __post_init__(self):
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        arity = {"point": 1, "uniform": 2, "truncated_gaussian": 2, "beta": 2}
        if self.kind not in arity:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if len(params) != arity[self.kind] or not all(math.isfinite(p) for p in params):
            raise ValueError(f"{self.kind} takes {arity[self.kind]} finite parameter(s), got {params}")
        if self.kind == "point" and not 0.0 <= params[0] <= 1.0:
            raise ValueError("point value must lie in [0, 1]")
        if self.kind == "uniform" and not 0.0 <= params[0] <= params[1] <= 1.0:
            raise ValueError("uniform needs 0 <= a <= b <= 1")
        if self.kind == "truncated_gaussian" and not params[1] > 0:
            raise ValueError("sigma must be positive")
        if self.kind == "beta" and not (params[0] > 0 and params[1] > 0):
            raise ValueError("beta shape parameters must be positive")

    @classmethod
    def point(cls, v):
        return cls("point", (v,))

    @classmethod
    def uniform(cls, a=0.0, b=1.0):
        return cls("uniform", (a, b))

    @classmethod
    def truncated_gaussian(cls, mu, sigma):
        return cls("truncated_gaussian", (mu, sigma))

    @classmethod
    def beta(cls, alpha, beta):
        return cls("beta", (alpha, beta))

    @classmethod
    def from_descriptor(cls, desc) -> "DeltaDistribution":
        """Build from a number (point mass) or ``{"kind": ..., "parameters": [...]}``."""
        if isinstance(desc, (int, float)) and not isinstance(desc, bool):
            return cls.point(desc)
        if not isinstance(desc, Mapping):
            raise ValueError(f"bad distribution descriptor {desc!r}")
        extra = set(desc) - {"kind", "parameters"}
        if extra:
            raise ValueError(f"unknown key(s) in distribution descriptor: {sorted(extra)}")
        return cls(desc["kind"], tuple(desc.get("parameters", ())))


def _truncated_std_normal(a: float, b: float, u: float) -> float:
    lo, hi = _STD_NORMAL.cdf(a), _STD_NORMAL.cdf(b)
    if hi <= lo:
        return a if abs(a) < abs(b) else b
    p = min(max(lo + u * (hi - lo), _TINY), 1.0 - 2.0**-53)
    return min(max(_STD_NORMAL.inv_cdf(p), a), b)


def sample_delta(dist: DeltaDistribution, stream) -> float:
    """One draw from ``dist`` using only ``stream`` (``random()`` and ``gamma(shape)``)."""
    if dist.kind == "point":
        return dist.params[0]
    if dist.kind == "uniform":
        a, b = dist.params
        return a + (b - a) * float(stream.random())
    if dist.kind == "truncated_gaussian":
        mu, sigma = dist.params
        u = float(stream.random())
        a, b = (0.0 - mu) / sigma, (1.0 - mu) / sigma
        # in the far upper tail the CDF saturates at 1; reflect to work near 0 instead
        z = -_truncated_std_normal(-b, -a, 1.0 - u) if a > 0 else _truncated_std_normal(a, b, u)
        return min(max(mu + sigma * z, 0.0), 1.0)
    alpha, beta = dist.params
    x = float(stream.gamma(alpha))
    y = float(stream.gamma(beta))
    if x + y == 0.0:
        return 0.5
    return x / (x + y)


def substream(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for sample ``index``; independent of execution order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(index),))))


# ---------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class SweepRow:
    delta1: float
    delta2: float
    s_star: tuple | None
    p_star: tuple
    u_star: tuple
    bargaining_area: float
    status: str
    solution: Solution | None = None

    def csv_row(self):
        s = self.s_star if self.s_star is not None else (math.nan, math.nan)
        return (self.delta1, self.delta2, *s, *self.p_star, *self.u_star, self.bargaining_area, self.status)


@dataclass(frozen=True)
class SweepTable:
    rows: tuple

    def __len__(self):
        return len(self.rows)

    def to_csv(self) -> str:
        return to_csv(SWEEP_HEADER, (r.csv_row() for r in self.rows))


_NAN2 = (math.nan, math.nan)


def _sweep_row(template: GameSpec, d1: float, d2: float, options: SolverOptions) -> SweepRow:
    try:
        game = template.with_deltas(d1, d2)
        sol = solve(game, options)
        area = bargaining_area(game, options.grid_resolution)
    except (EvaluationError, SolverError, GameValidationError) as exc:
        return SweepRow(d1, d2, None, _NAN2, _NAN2, math.nan, FAILED)
    return SweepRow(d1, d2, sol.s_star, sol.p_star, sol.u_star, area, sol.status, sol)


def sweep_grid(template: GameSpec, deltas1: Sequence[float], deltas2: Sequence[float],
               options: SolverOptions | None = None) -> SweepTable:
    """Solve on every (delta1, delta2) pair; rows in lexicographic order.

    The template's own deltas are ignored. A row whose solve fails is kept
    with status ``failed``.
    """
    options = options or SolverOptions()
    for d in (*deltas1, *deltas2):
        if not 0.0 <= d <= 1.0:
            raise ValueError(f"delta {d!r} outside [0, 1]")
    pairs = sorted((float(a), float(b)) for a in deltas1 for b in deltas2)
    return SweepTable(tuple(_sweep_row(template, a, b, options) for a, b in pairs))


def sweep_constant(template: GameSpec, deltas: Sequence[float], options: SolverOptions | None = None) -> SweepTable:
    """Constant-rationality sweep: both players share each delta in turn."""
    options = options or SolverOptions()
    for d in deltas:
        if not 0.0 <= d <= 1.0:
            raise ValueError(f"delta {d!r} outside [0, 1]")
    return SweepTable(tuple(_sweep_row(template, d, d, options) for d in sorted(float(x) for x in deltas)))


# ---------------------------------------------------------------- Monte Carlo


@dataclass(frozen=True)
class MonteCarloRow:
    draw: int
    delta1: float
    delta2: float
    s_star: tuple
    p_star: tuple
    u_star: tuple
    status: str

    def values(self):
        return (self.delta1, self.delta2, *self.s_star, *self.p_star, *self.u_star)

    def csv_row(self):
        return (self.draw, *self.values(), self.status)


@dataclass(frozen=True)
class Summary:
    count: int
    mean: float
    sd: float
    quantiles: tuple  # at QUANTILES


@dataclass(frozen=True)
class MonteCarloReport:
    sample_count: int
    seed: int
    rows: tuple
    summaries: dict
    disagreement_rate: float
    failed_count: int

    def to_csv(self) -> str:
        trailer = [
            f"# sample_count,{self.sample_count}",
            f"# seed,{self.seed}",
            f"# failed,{self.failed_count}",
            f"# disagreement_rate,{fmt(self.disagreement_rate)}",
            "# quantity,count,mean,sd," + ",".join(f"q{int(round(q * 100)):02d}" for q in QUANTILES),
        ]
        for name in MC_QUANTITIES:
            s = self.summaries[name]
            trailer.append(
                "# " + ",".join([name, str(s.count), fmt(s.mean), fmt(s.sd)] + [fmt(q) for q in s.quantiles])
            )
        return to_csv(MC_HEADER, (r.csv_row() for r in self.rows), trailer)


def summarize(values) -> Summary:
    v = np.asarray(values, dtype=float)
    v = v[~np.isnan(v)]
    if v.size == 0:
        return Summary(0, math.nan, math.nan, tuple(math.nan for _ in QUANTILES))
    sd = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
    return Summary(int(v.size), float(np.mean(v)), sd, tuple(float(q) for q in np.quantile(v, QUANTILES)))


def _summaries(rows):
    ok = [r for r in rows if r.status != FAILED]
    table = np.array([r.values() for r in ok], dtype=float).reshape(len(ok), len(MC_QUANTITIES))
    return {name: summarize(table[:, k]) for k, name in enumerate(MC_QUANTITIES)}


def monte_carlo(template: GameSpec, dist1: DeltaDistribution, dist2: DeltaDistribution, n: int, seed: int,
                options: SolverOptions | None = None) -> MonteCarloReport:
    """Solve the game under ``n`` independent draws of (delta1, delta2).

    Sample ``i`` draws delta1 then delta2 from ``substream(seed, i)``, so the
    report depends only on (seed, n), never on evaluation order.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    options = options or SolverOptions()
    rows = []
    for i in range(n):
        stream = substream(seed, i)
        d1 = sample_delta(dist1, stream)
        d2 = sample_delta(dist2, stream)
        try:
            sol = solve(template.with_deltas(d1, d2), options)
        except (EvaluationError, SolverError, GameValidationError):
            rows.append(MonteCarloRow(i, d1, d2, _NAN2, _NAN2, _NAN2, FAILED))
            continue
        s = sol.s_star if sol.s_star is not None else _NAN2
        rows.append(MonteCarloRow(i, d1, d2, s, sol.p_star, sol.u_star, sol.status))
    ok = [r for r in rows if r.status != FAILED]
    failed = len(rows) - len(ok)
    rate = sum(r.status in (DISAGREEMENT, DEGENERATE) for r in ok) / len(ok) if ok else math.nan
    return MonteCarloReport(n, int(seed), tuple(rows), _summaries(rows), rate, failed)


# ---------------------------------------------------------------- welfare


@dataclass(frozen=True)
class PlayerWelfare:
    behavioral_payoff: float
    rational_value: float
    distortion_value: float
    decomposition_residual: float
    welfare_gap: float


@dataclass(frozen=True)
class WelfareReport:
    players: tuple  # (PlayerWelfare, PlayerWelfare)
    benchmark: Solution

    def to_csv(self) -> str:
        rows = (
            (k + 1, w.behavioral_payoff, w.rational_value, w.distortion_value, w.decomposition_residual, w.welfare_gap)
            for k, w in enumerate(self.players)
        )
        return to_csv(WELFARE_HEADER, rows)


def welfare_report(game: GameSpec, sol: Solution, options: SolverOptions | None = None) -> WelfareReport:
    """Behaviour is judged by payoffs, welfare by rational values.

    welfare_gap_i = U_i at the fully rational (delta = 1, 1) solution of the
    same game minus U_i(s*).
    """
    bench = solve(game.with_deltas(1.0, 1.0), options)
    out = []
    for k, player in enumerate(game.players):
        u, d, p = sol.u_star[k], sol.d_vals[k], sol.p_star[k]
        resid = abs(p - (player.delta * u + (1.0 - player.delta) * d)) / max(1.0, abs(p))
        out.append(PlayerWelfare(p, u, d, resid, bench.u_star[k] - u))
    return WelfareReport(tuple(out), bench)
