"""
Audit: what happens when exactly one player has delta = 0
=========================================================

In the fixed-sum division game (split 100, each player's distortion is
own money minus the other's) it is tempting to expect that a single fully
irrational player collapses bargaining to the disagreement point (0, 0).
Brute force says otherwise whenever the other player keeps some rationality.

Run:  python3 demos/boundary_claim_audit.py
"""

import itertools

import numpy as np

from deltanash import division_game, solve

M = 100.0
STEP = 0.25  # lattice spacing over the simplex; 0.25 hits the true optimum


def payoffs(d1, d2, s1, s2):
    return d1 * s1 + (1 - d1) * (s1 - s2), d2 * s2 + (1 - d2) * (s2 - s1)


def brute_force(d1, d2):
    # every lattice point of {s1, s2 >= 0, s1 + s2 <= M}
    grid = np.arange(0.0, M + STEP / 2, STEP)
    S1, S2 = np.meshgrid(grid, grid, indexing="ij")
    keep = S1 + S2 <= M + 1e-12
    S1, S2 = S1[keep], S2[keep]
    P1, P2 = payoffs(d1, d2, S1, S2)
    strict = (P1 > 0) & (P2 > 0)
    prod = np.where((P1 >= 0) & (P2 >= 0), P1 * P2, -np.inf)
    k = int(np.argmax(prod))
    return int(strict.sum()), (S1[k], S2[k]), (P1[k], P2[k]), prod[k]


cases = [(0.0, 1.0), (1.0, 0.0), (0.0, 0.5), (0.0, 0.1), (0.0, 0.0)]
print(f"{'delta':>12} {'strict pts':>10} {'brute s*':>16} {'brute p*':>18} {'solver p*':>18} flag")
for d1, d2 in cases:
    n_strict, s, p, _ = brute_force(d1, d2)
    sol = solve(division_game(d1, d2))
    flag = sol.diagnostics.paper_boundary_claim_mismatch
    print(
        f"({d1:.1f}, {d2:.1f})".rjust(12),
        f"{n_strict:>10d}",
        f"({s[0]:6.2f}, {s[1]:6.2f})",
        f"({p[0]:7.3f}, {p[1]:7.3f})",
        f"({sol.p_star[0]:7.3f}, {sol.p_star[1]:7.3f})",
        flag,
    )

# The solver's Nash product is never beaten by the lattice, and the lattice
# comes within 1% of it.
for d1, d2 in itertools.product([0.0], [1.0, 0.5, 0.1]):
    *_, best = brute_force(d1, d2)
    sol = solve(division_game(d1, d2))
    assert best <= sol.nash_product * (1 + 1e-12), (d1, d2)
    assert best >= 0.99 * sol.nash_product, (d1, d2)

# Closed form at delta = (0, 1): p1 = s1 - s2 and p2 = s2 on s1 + s2 = 100,
# so the product (2 s1 - 100)(100 - s1) peaks at s1 = 75.
print()
print("delta = (0, 1): s* = (75, 25), p* = (50, 25); the disagreement point does not prevail.")
print("delta = (0, 0): no allocation gives both players a positive payoff; p* = (0, 0).")
