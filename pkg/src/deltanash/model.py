"""Players, games, and the rationality-weighted payoff."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

from .expr import Expr, ExprError, as_expr, eval_array, eval_value_expr, swap_variables
from .polygon import FeasiblePolygon, GeometryError


@dataclass(frozen=True)
class Issue:
    code: str
    message: str
    path: str = ""

    def __str__(self):
        where = f"{self.path}: " if self.path else ""
        return f"{where}{self.message} [{self.code}]"


class GameValidationError(ValueError):
    """Carries every violated invariant, each with a machine-readable code."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))

    @property
    def codes(self):
        return [i.code for i in self.issues]


def _delta_issue(delta, path):
    if isinstance(delta, bool) or not isinstance(delta, (int, float)) or not math.isfinite(delta):
        return Issue("delta_out_of_range", "delta out of range (not a finite number)", path)
    if not 0.0 <= delta <= 1.0:
        return Issue("delta_out_of_range", f"delta out of range: {delta!r} not in [0, 1]", path)
    return None


@dataclass(frozen=True)
class PlayerSpec:
    """Rational value U, distortion value D and rationality index delta.

    Expressions may be passed as text; they are parsed on construction.
    """

    rational_value: Expr
    distortion_value: Expr
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "rational_value", as_expr(self.rational_value))
        object.__setattr__(self, "distortion_value", as_expr(self.distortion_value))
        issue = _delta_issue(self.delta, "delta")
        if issue:
            raise GameValidationError([issue])
        object.__setattr__(self, "delta", float(self.delta))

    def with_delta(self, delta: float) -> "PlayerSpec":
        return replace(self, delta=delta)


def payoff(player: PlayerSpec, s1: float, s2: float) -> float:
    """delta * U(s1, s2) + (1 - delta) * D(s1, s2)."""
    u = eval_value_expr(player.rational_value, s1, s2)
    d = eval_value_expr(player.distortion_value, s1, s2)
    return player.delta * u + (1.0 - player.delta) * d


def payoff_array(player: PlayerSpec, s1, s2):
    """Vectorised payoff over arrays of allocations."""
    u = eval_array(player.rational_value, s1, s2)
    d = eval_array(player.distortion_value, s1, s2)
    return player.delta * u + (1.0 - player.delta) * d


@dataclass(frozen=True)
class GameSpec:
    """Two-player bargaining game over a convex outcome polygon.

    Exactly one of ``disagreement`` (a payoff pair) or ``threats`` (an
    allocation in the outcome polygon) is set. With neither given the
    disagreement payoff defaults to (0, 0).
    """

    player1: PlayerSpec
    player2: PlayerSpec
    outcome_space: FeasiblePolygon
    disagreement: tuple | None = None
    threats: tuple | None = None

    def __post_init__(self):
        if self.disagreement is None and self.threats is None:
            object.__setattr__(self, "disagreement", (0.0, 0.0))
        issues = _structural_issues(self)
        if issues:
            raise GameValidationError(issues)
        if self.disagreement is not None:
            object.__setattr__(self, "disagreement", tuple(float(x) for x in self.disagreement))
        if self.threats is not None:
            object.__setattr__(self, "threats", tuple(float(x) for x in self.threats))

    @property
    def players(self):
        return (self.player1, self.player2)

    @property
    def deltas(self):
        return (self.player1.delta, self.player2.delta)

    def disagreement_point(self) -> tuple:
        """Explicit disagreement payoffs, mapping threats through the payoffs."""
        if self.threats is not None:
            t1, t2 = self.threats
            return (payoff(self.player1, t1, t2), payoff(self.player2, t1, t2))
        return self.disagreement

    def with_deltas(self, delta1: float, delta2: float) -> "GameSpec":
        return replace(
            self, player1=self.player1.with_delta(delta1), player2=self.player2.with_delta(delta2)
        )

    def swapped(self) -> "GameSpec":
        """The same game with the roles of the two players exchanged."""

        def flip(p):
            return PlayerSpec(swap_variables(p.rational_value), swap_variables(p.distortion_value), p.delta)

        return GameSpec(
            flip(self.player2),
            flip(self.player1),
            self.outcome_space.transposed(),
            disagreement=None if self.disagreement is None else self.disagreement[::-1],
            threats=None if self.threats is None else self.threats[::-1],
        )


def _structural_issues(game: GameSpec) -> list:
    issues = []
    if (game.disagreement is None) == (game.threats is None):
        issues.append(
            Issue("mutually_exclusive_keys", "give exactly one of disagreement payoffs or threats", "disagreement")
        )
    try:
        game.outcome_space.vertices
    except GeometryError as exc:
        issues.append(Issue(exc.code, str(exc), "outcome_space"))
        return issues
    if game.threats is not None:
        t = tuple(game.threats)
        if len(t) != 2 or not game.outcome_space.contains(t[0], t[1]):
            issues.append(Issue("threat_outside_outcome_space", f"threat outside outcome space: {t!r}", "threats"))
    return issues


def division_game(delta1: float = 1.0, delta2: float = 1.0, budget: float = 100.0) -> GameSpec:
    """Division of a fixed sum with envy-type distortion values.

    U1 = s1, U2 = s2, D1 = s1 - s2, D2 = s2 - s1, budget simplex, and
    disagreement payoff (0, 0).
    """
    return GameSpec(
        PlayerSpec("s1", "s1 - s2", delta1),
        PlayerSpec("s2", "s2 - s1", delta2),
        FeasiblePolygon.budget(budget),
        disagreement=(0.0, 0.0),
    )


# ---------------------------------------------------------------- raw validation

_PLAYER_KEYS = {"utility", "distortion", "delta"}
_TOP_KEYS = {"budget", "constraints", "player1", "player2", "disagreement", "solver"}


def validate_game(spec, *, allow_distribution_delta: bool = False):
    """Validate a game and return it, or raise GameValidationError listing every issue.

    ``spec`` is either a GameSpec (already checked on construction, returned
    as is) or a plain mapping with the scenario-file layout::

        {"budget": 100,
         "player1": {"utility": "s1", "distortion": "s1 - s2", "delta": 1},
         "player2": {...},
         "disagreement": {"payoffs": [0, 0]}}

    With ``allow_distribution_delta`` a mapping-valued delta is passed
    through untouched (placeholder 1.0 in the returned game) and the
    descriptors are returned alongside: ``(game, (desc1, desc2))``.
    """
    if isinstance(spec, GameSpec):
        return spec
    if not isinstance(spec, Mapping):
        raise GameValidationError([Issue("bad_type", "game spec must be a GameSpec or a mapping")])

    issues = []
    for key in spec:
        if key not in _TOP_KEYS:
            issues.append(Issue("unknown_key", f"unknown key {key!r}", str(key)))

    poly = None
    if "budget" in spec and "constraints" in spec:
        issues.append(Issue("mutually_exclusive_keys", "mutually exclusive keys: budget and constraints", "budget"))
    elif "budget" in spec:
        b = spec["budget"]
        if isinstance(b, bool) or not isinstance(b, (int, float)) or not math.isfinite(b) or b <= 0:
            issues.append(Issue("empty_outcome_space", f"budget must be a positive number, got {b!r}", "budget"))
        else:
            poly = FeasiblePolygon.budget(b)
    elif "constraints" in spec:
        try:
            rows = []
            for k, row in enumerate(spec["constraints"]):
                if isinstance(row, Mapping):
                    extra = set(row) - {"a1", "a2", "b"}
                    if extra:
                        issues.append(Issue("unknown_key", f"unknown key(s) {sorted(extra)}", f"constraints[{k}]"))
                    rows.append((row["a1"], row["a2"], row["b"]))
                else:
                    rows.append(tuple(row))
            poly = FeasiblePolygon(tuple(rows))
        except (KeyError, TypeError, ValueError) as exc:
            issues.append(Issue("bad_constraint", f"malformed constraints: {exc}", "constraints"))
    else:
        issues.append(Issue("missing_key", "one of budget or constraints is required", "budget"))

    if poly is not None:
        try:
            poly.vertices
        except GeometryError as exc:
            issues.append(Issue(exc.code, str(exc), "constraints"))
            poly = None

    players = []
    descriptors = []
    for name in ("player1", "player2"):
        raw = spec.get(name)
        if not isinstance(raw, Mapping):
            issues.append(Issue("missing_key", f"{name} must be a mapping", name))
            players.append(None)
            descriptors.append(None)
            continue
        for key in raw:
            if key not in _PLAYER_KEYS:
                issues.append(Issue("unknown_key", f"unknown key {key!r}", f"{name}.{key}"))
        exprs = []
        for key in ("utility", "distortion"):
            if key not in raw:
                issues.append(Issue("missing_key", f"missing key {key!r}", f"{name}.{key}"))
                exprs.append(None)
                continue
            try:
                exprs.append(as_expr(raw[key]))
            except (ExprError, TypeError) as exc:
                issues.append(Issue("unparseable_expression", f"unparseable expression: {exc}", f"{name}.{key}"))
                exprs.append(None)
        delta = raw.get("delta")
        desc = None
        if isinstance(delta, Mapping) and allow_distribution_delta:
            desc = delta
            delta = 1.0
        elif delta is None:
            issues.append(Issue("missing_key", "missing key 'delta'", f"{name}.delta"))
        else:
            issue = _delta_issue(delta, f"{name}.delta")
            if issue:
                issues.append(issue)
        descriptors.append(desc)
        if None in exprs or _delta_issue(delta, "") is not None:
            players.append(None)
        else:
            players.append(PlayerSpec(exprs[0], exprs[1], delta))

    disagreement = threats = None
    raw_d = spec.get("disagreement", {"payoffs": [0.0, 0.0]})
    if not isinstance(raw_d, Mapping) or len(raw_d) != 1 or not set(raw_d) <= {"payoffs", "threats"}:
        issues.append(
            Issue("mutually_exclusive_keys", "disagreement needs exactly one of 'payoffs' or 'threats'", "disagreement")
        )
    else:
        (kind, value), = raw_d.items()
        try:
            pair = tuple(float(x) for x in value)
            if len(pair) != 2 or not all(math.isfinite(x) for x in pair):
                raise ValueError
        except (TypeError, ValueError):
            issues.append(Issue("bad_disagreement", f"{kind} must be a pair of numbers", f"disagreement.{kind}"))
        else:
            if kind == "payoffs":
                disagreement = pair
            else:
                threats = pair
                if poly is not None and not poly.contains(*pair):
                    issues.append(
                        Issue("threat_outside_outcome_space", f"threat outside outcome space: {pair!r}", "disagreement.threats")
                    )

    if issues:
        raise GameValidationError(issues)
    game = GameSpec(players[0], players[1], poly, disagreement=disagreement, threats=threats)
    if allow_distribution_delta:
        return game, tuple(descriptors)
    return game
