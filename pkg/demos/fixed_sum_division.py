"""
Splitting 100 between two envious players
=========================================

Each player values their own money (rational value) but also cares about
being ahead of the other (distortion).  delta weights the two.

Run:  python3 demos/fixed_sum_division.py
"""

from deltanash import closed_form_example, division_game, solve

# Fully rational players split evenly.
print(solve(division_game(1, 1)).s_star)

# Less rationality means a bigger share: the player who cares more about
# being ahead takes more of the money.
for d1, d2 in [(0.25, 0.75), (0.5, 0.5), (0.9, 0.3)]:
    sol = solve(division_game(d1, d2))
    ref = closed_form_example(d1, d2)
    print(f"delta=({d1}, {d2})  s*=({sol.s_star[0]:.4f}, {sol.s_star[1]:.4f})"
          f"  p*=({sol.p_star[0]:.4f}, {sol.p_star[1]:.4f})"
          f"  closed form s1*={ref.s_star[0]:.4f}")

# Shared rationality scales the payoffs but not the split.
for d in [0.2, 0.6, 1.0]:
    sol = solve(division_game(d, d))
    print(f"common delta {d}: s*={sol.s_star}, p*=({sol.p_star[0]:.2f}, {sol.p_star[1]:.2f})")

# Nobody rational at all: nothing beats the disagreement point.
sol = solve(division_game(0, 0))
print(sol.status, sol.p_star)
