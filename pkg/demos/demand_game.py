"""
Playing the demand game
=======================

Threats fix the fallback, both players announce, then demand.  Demands the
outcome space can meet are paid; otherwise threats are carried out.

Run:  python3 demos/demand_game.py
"""

from deltanash import division_game, nash_demands, run_demand_game

game = division_game(0.25, 0.75)

q = nash_demands(game)
t = run_demand_game(game, q)
print("Nash demands", q, "->", t.compatible, t.final_payoffs)

# Greedy player 1 asks for a little more; the deal falls apart.
t = run_demand_game(game, (q[0] + 1, q[1]), threats=(30, 30))
print("greedy demand ->", t.compatible, t.final_payoffs)

# Modest demands always clear.
t = run_demand_game(game, (10, 10))
print("modest demands ->", t.compatible, t.final_payoffs, "witness", t.witness)
