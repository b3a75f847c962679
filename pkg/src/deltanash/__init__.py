"""Nash bargaining for two-player games whose payoffs mix a rational value
and a distortion value, weighted by a per-player rationality index delta."""

from .analysis import (
    DeltaDistribution,
    MonteCarloReport,
    SweepTable,
    WelfareReport,
    monte_carlo,
    sample_delta,
    substream,
    sweep_constant,
    sweep_grid,
    welfare_report,
)
from .bargaining import BargainingSet, PayoffPointCloud, bargaining_area, bargaining_set, payoff_image
from .demand import (
    TRANSCRIPT_HEADER,
    DemandGameTranscript,
    demands_compatible,
    nash_demands,
    run_demand_game,
    transcript_csv,
)
from .expr import EvaluationError, ExprError, eval_value_expr, parse_value_expr, unparse
from .model import GameSpec, GameValidationError, PlayerSpec, division_game, payoff, validate_game
from .polygon import FeasiblePolygon, GeometryError, efficient_frontier, polygon_area, polygon_vertices
from .scenario import Scenario, ScenarioError, load_scenario
from .solver import (
    Solution,
    SolverOptions,
    VertexOptimum,
    closed_form_example,
    nash_product,
    solve,
    stationarity_residual,
)

__version__ = "0.1.0"
