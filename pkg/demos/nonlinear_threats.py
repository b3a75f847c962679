"""
A non-affine game with a capped outcome space and threats
=========================================================

Concave rational values, kinked distortions, and a threat allocation.
The solver falls back from the exact affine path to a raster search
refined by pattern search.

Run:  python3 demos/nonlinear_threats.py
"""

from pathlib import Path

from deltanash import bargaining_set, load_scenario, solve, stationarity_residual

scn = load_scenario(Path(__file__).resolve().parents[1] / "scenarios" / "nonlinear-threats.scn")
sol = solve(scn.game, scn.options)
print("method", sol.diagnostics.method, "steps", sol.diagnostics.refinement_steps)
print("s*", sol.s_star, "p*", sol.p_star, "status", sol.status)
print("stationarity residual", stationarity_residual(scn.game, sol))

bset = bargaining_set(scn.game, resolution=200)
print("estimated bargaining-set area", round(bset.area, 1), "from", len(bset.cloud), "raster points")
