"""Payoff-space images of the outcome polygon and bargaining sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import GameSpec, payoff_array
from .polygon import polygon_area
from .tabular import to_csv
from .solver import affine_payoffs, dominance_region

DEFAULT_RESOLUTION = 400


@dataclass(frozen=True)
class PayoffPointCloud:
    """Feasible raster points and their payoffs, in row-major (s1-major) order."""

    s1: np.ndarray
    s2: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    resolution: int

    def __len__(self):
        return len(self.s1)

    def records(self):
        return [
            {"s1": float(a), "s2": float(b), "p1": float(c), "p2": float(d)}
            for a, b, c, d in zip(self.s1, self.s2, self.p1, self.p2)
        ]

    def subset(self, mask) -> "PayoffPointCloud":
        return PayoffPointCloud(self.s1[mask], self.s2[mask], self.p1[mask], self.p2[mask], self.resolution)


@dataclass(frozen=True)
class BargainingSet:
    cloud: PayoffPointCloud
    disagreement: tuple
    boundary: tuple | None  # exact payoff-space polygon (affine payoffs only)
    area: float
    pareto_frontier: tuple
    is_degenerate: bool
    exact: bool
    paper_boundary_claim_mismatch: bool = False


def _grid(poly, resolution):
    lo1, hi1, lo2, hi2 = poly.bounding_box()
    g1 = np.linspace(lo1, hi1, resolution)
    g2 = np.linspace(lo2, hi2, resolution)
    S1, S2 = np.meshgrid(g1, g2, indexing="ij")
    return S1.ravel(), S2.ravel()


def payoff_image(game: GameSpec, resolution: int = DEFAULT_RESOLUTION) -> PayoffPointCloud:
    """Rasterise the outcome polygon over its bounding box and attach payoffs.

    Evaluation errors (division by zero) propagate with the offending point.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    poly = game.outcome_space
    S1, S2 = _grid(poly, resolution)
    keep = poly.contains(S1, S2)
    S1, S2 = S1[keep], S2[keep]
    P1 = payoff_array(game.player1, S1, S2)
    P2 = payoff_array(game.player2, S1, S2)
    return PayoffPointCloud(S1, S2, P1, P2, resolution)


def counted_cell_area(game: GameSpec, resolution: int = DEFAULT_RESOLUTION) -> float:
    """Raster estimate of the bargaining-set area in payoff space.

    Cells of the outcome-space bounding box whose centre is feasible and
    dominates the disagreement point are counted, each weighted by the
    absolute Jacobian determinant of the payoff map at the centre.
    """
    poly = game.outcome_space
    eps = poly.tolerance
    d = game.disagreement_point()
    lo1, hi1, lo2, hi2 = poly.bounding_box()
    h1 = (hi1 - lo1) / resolution
    h2 = (hi2 - lo2) / resolution
    if h1 == 0 or h2 == 0:
        return 0.0
    c1 = lo1 + h1 * (np.arange(resolution) + 0.5)
    c2 = lo2 + h2 * (np.arange(resolution) + 0.5)
    S1, S2 = np.meshgrid(c1, c2, indexing="ij")
    S1, S2 = S1.ravel(), S2.ravel()
    keep = poly.contains(S1, S2, tol=0.0)
    S1, S2 = S1[keep], S2[keep]
    P1 = payoff_array(game.player1, S1, S2)
    P2 = payoff_array(game.player2, S1, S2)
    dom = (P1 >= d[0] - eps) & (P2 >= d[1] - eps)
    S1, S2 = S1[dom], S2[dom]
    if S1.size == 0:
        return 0.0
    e1, e2 = h1 / 2, h2 / 2
    j11 = (payoff_array(game.player1, S1 + e1, S2) - payoff_array(game.player1, S1 - e1, S2)) / h1
    j12 = (payoff_array(game.player1, S1, S2 + e2) - payoff_array(game.player1, S1, S2 - e2)) / h2
    j21 = (payoff_array(game.player2, S1 + e1, S2) - payoff_array(game.player2, S1 - e1, S2)) / h1
    j22 = (payoff_array(game.player2, S1, S2 + e2) - payoff_array(game.player2, S1, S2 - e2)) / h2
    return float(np.sum(np.abs(j11 * j22 - j12 * j21)) * h1 * h2)


def _nondominated(points):
    """Mutually non-dominated points (maximising both coordinates), sorted by p1."""
    pts = sorted(set(points), key=lambda p: (-p[0], -p[1]))
    out = []
    best2 = -math.inf
    for p in pts:
        if p[1] > best2:
            out.append(p)
            best2 = p[1]
    return tuple(sorted(out))


def _affine_image(lin, verts):
    (c1, a11, a12), (c2, a21, a22) = lin
    img = [(c1 + a11 * x + a12 * y, c2 + a21 * x + a22 * y) for x, y in verts]
    if a11 * a22 - a12 * a21 < 0:
        img = img[::-1]
    out = []
    for q in img:
        if not out or math.dist(q, out[-1]) > 0:
            out.append(q)
    if len(out) > 1 and math.dist(out[0], out[-1]) == 0:
        out.pop()
    return out


def bargaining_set(game: GameSpec, resolution: int = DEFAULT_RESOLUTION) -> BargainingSet:
    """Feasible payoff points weakly dominating the disagreement point.

    For affine payoffs the boundary polygon and area are exact (image of the
    dominance region of the outcome polygon); otherwise the area is the
    counted-cell estimate and the boundary is left unset.
    """
    poly = game.outcome_space
    eps = poly.tolerance
    d = game.disagreement_point()
    cloud = payoff_image(game, resolution)
    mask = (cloud.p1 >= d[0] - eps) & (cloud.p2 >= d[1] - eps)
    members = cloud.subset(mask)
    zeros = sum(1 for x in game.deltas if x == 0.0)

    lin = affine_payoffs(game)
    if lin is not None:
        region = dominance_region(game, lin)
        boundary = tuple(_affine_image(lin, region))
        area = polygon_area(boundary)
        degenerate = bool(boundary) and all(
            abs(p[0] - d[0]) <= eps and abs(p[1] - d[1]) <= eps for p in boundary
        )
        frontier = _nondominated(boundary)
        exact = True
    else:
        boundary = None
        near = (np.abs(members.p1 - d[0]) <= eps) & (np.abs(members.p2 - d[1]) <= eps)
        degenerate = len(members) > 0 and bool(np.all(near))
        area = 0.0 if degenerate else counted_cell_area(game, resolution)
        frontier = _nondominated(zip(members.p1.tolist(), members.p2.tolist()))
        exact = False
    nonempty = bool(boundary) if exact else len(members) > 0
    return BargainingSet(
        cloud=members,
        disagreement=tuple(d),
        boundary=boundary,
        area=float(area),
        pareto_frontier=frontier,
        is_degenerate=degenerate,
        exact=exact,
        paper_boundary_claim_mismatch=zeros == 1 and nonempty and not degenerate,
    )


BARGAINING_SET_HEADER = ("s1", "s2", "p1", "p2")


def bargaining_set_csv(bset: BargainingSet) -> str:
    """Members as CSV (header s1,s2,p1,p2), row-major, 9 significant digits."""
    rows = zip(bset.cloud.s1, bset.cloud.s2, bset.cloud.p1, bset.cloud.p2)
    return to_csv(BARGAINING_SET_HEADER, rows)



def bargaining_area(game: GameSpec, resolution: int = DEFAULT_RESOLUTION) -> float:
    """Area of the bargaining set without materialising the point cloud."""
    lin = affine_payoffs(game)
    if lin is None:
        return bargaining_set(game, resolution).area
    return polygon_area(_affine_image(lin, dominance_region(game, lin)))
