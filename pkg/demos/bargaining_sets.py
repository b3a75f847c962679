"""
How the bargaining set shrinks with rationality
===============================================

Writes one CSV per delta pair (payoff points that weakly dominate the
disagreement point) into an output directory, ready for any plotting tool,
and prints the exact areas.

Run:  python3 demos/bargaining_sets.py [outdir]
"""

import sys
from pathlib import Path

from deltanash import bargaining_set, division_game
from deltanash.bargaining import bargaining_set_csv

out = Path(sys.argv[1] if len(sys.argv) > 1 else "bargaining_set_data")
out.mkdir(exist_ok=True)

for d1, d2 in [(1, 1), (0.75, 0.75), (0.5, 0.5), (0.25, 0.75), (0, 1), (0, 0)]:
    bset = bargaining_set(division_game(d1, d2), resolution=101)
    (out / f"bset_{d1}_{d2}.csv").write_text(bargaining_set_csv(bset))
    # the polygon corners are the interesting part for plotting outlines
    corners = ", ".join(f"({p:.1f}, {q:.1f})" for p, q in bset.boundary)
    print(f"delta=({d1}, {d2}) area={bset.area:8.2f} degenerate={bset.is_degenerate}  corners: {corners}")

print(f"point clouds written to {out}/")
