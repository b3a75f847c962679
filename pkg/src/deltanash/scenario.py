"""Scenario files: YAML documents describing a game, optionally with random deltas.

Example::

    budget: 100
    player1: {utility: "s1", distortion: "s1 - s2", delta: 0.25}
    player2: {utility: "s2", distortion: "s2 - s1", delta: {kind: beta, parameters: [2, 2]}}
    disagreement: {payoffs: [0, 0]}
    solver: {grid_resolution: 400}
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import yaml

from .analysis import DeltaDistribution
from .model import GameSpec, GameValidationError, Issue, validate_game
from .solver import SolverOptions

_SOLVER_KEYS = {"grid_resolution", "refinement_tolerance", "max_refinement_steps", "affine_fast_path"}


class ScenarioError(ValueError):
    """Malformed or invalid scenario; ``issues`` lists every problem found."""

    def __init__(self, path, issues):
        self.path = str(path)
        self.issues = list(issues)
        super().__init__(f"{self.path}: " + "; ".join(str(i) for i in self.issues))


@dataclass(frozen=True)
class Scenario:
    game: GameSpec
    options: SolverOptions
    dist1: DeltaDistribution
    dist2: DeltaDistribution

    @property
    def is_template(self) -> bool:
        """True when a delta is random; such scenarios only make sense for Monte Carlo."""
        return self.dist1.kind != "point" or self.dist2.kind != "point"


def parse_scenario(data, source="<scenario>") -> Scenario:
    if not isinstance(data, Mapping):
        raise ScenarioError(source, [Issue("bad_type", "top level must be a mapping")])
    try:
        game, descs = validate_game(data, allow_distribution_delta=True)
    except GameValidationError as exc:
        raise ScenarioError(source, exc.issues) from None

    issues = []
    dists = []
    for k, desc in enumerate(descs, start=1):
        if desc is None:
            dists.append(DeltaDistribution.point(game.players[k - 1].delta))
            continue
        try:
            dists.append(DeltaDistribution.from_descriptor(desc))
        except (KeyError, TypeError, ValueError) as exc:
            issues.append(Issue("bad_distribution", str(exc), f"player{k}.delta"))

    raw_solver = data.get("solver") or {}
    options = SolverOptions()
    if not isinstance(raw_solver, Mapping):
        issues.append(Issue("bad_type", "solver must be a mapping", "solver"))
    else:
        extra = set(raw_solver) - _SOLVER_KEYS
        for key in sorted(extra):
            issues.append(Issue("unknown_key", f"unknown key {key!r}", f"solver.{key}"))
        if not extra:
            try:
                options = SolverOptions(**raw_solver)
            except (TypeError, ValueError) as exc:
                issues.append(Issue("bad_solver_option", str(exc), "solver"))
    if issues:
        raise ScenarioError(source, issues)
    return Scenario(game, options, dists[0], dists[1])


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file.

    YAML syntax errors are reported with their line number; semantic
    problems with the key path that caused them.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark is not None else ""
        raise ScenarioError(path, [Issue("syntax_error", f"YAML parse error: {getattr(exc, 'problem', exc)}", where)]) from None
    return parse_scenario(data, path)
