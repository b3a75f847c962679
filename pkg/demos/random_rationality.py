"""
Random rationality and welfare
==============================

When rationality indices are random, the solution is a random variable.
The second half compares what players do (payoffs) with how well off they
are (rational values).

Run:  python3 demos/random_rationality.py
"""

from deltanash import DeltaDistribution, division_game, monte_carlo, solve, welfare_report

b = DeltaDistribution.beta(2, 2)
rep = monte_carlo(division_game(), b, b, n=2000, seed=7)
for name in ("s1_star", "s2_star", "p1_star"):
    s = rep.summaries[name]
    print(f"{name}: mean {s.mean:.3f}  sd {s.sd:.3f}  5%-95% [{s.quantiles[0]:.2f}, {s.quantiles[-1]:.2f}]")

# A mostly rational player 2 against a mostly envious player 1.
rep = monte_carlo(division_game(), DeltaDistribution.truncated_gaussian(0.3, 0.2),
                  DeltaDistribution.uniform(0.7, 1.0), n=2000, seed=7)
print("skewed: mean s* =", round(rep.summaries["s1_star"].mean, 2), round(rep.summaries["s2_star"].mean, 2))

# Envy pays in money for the envious player, but both lose payoff relative
# to the fully rational benchmark.
game = division_game(0.25, 0.75)
w = welfare_report(game, solve(game))
for k, pw in enumerate(w.players, start=1):
    print(f"player {k}: payoff {pw.behavioral_payoff:.3f}  rational value {pw.rational_value:.3f}"
          f"  welfare gap {pw.welfare_gap:+.3f}")
