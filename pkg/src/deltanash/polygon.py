"""Convex outcome polygons given by linear constraints a1*s1 + a2*s2 <= b."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

REL_TOL = 1e-9


class GeometryError(ValueError):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


@dataclass(frozen=True)
class FeasiblePolygon:
    """Intersection of half-planes ``a1*s1 + a2*s2 <= b``."""

    constraints: tuple

    def __post_init__(self):
        cons = tuple(tuple(float(c) for c in row) for row in self.constraints)
        for row in cons:
            if len(row) != 3 or not all(math.isfinite(c) for c in row):
                raise GeometryError("bad_constraint", f"constraint must be three finite numbers: {row!r}")
        object.__setattr__(self, "constraints", cons)

    @classmethod
    def budget(cls, total: float) -> "FeasiblePolygon":
        """The simplex {s1 >= 0, s2 >= 0, s1 + s2 <= total}."""
        return cls(((-1.0, 0.0, 0.0), (0.0, -1.0, 0.0), (1.0, 1.0, float(total))))

    @classmethod
    def box(cls, lo1, hi1, lo2, hi2) -> "FeasiblePolygon":
        return cls(((-1.0, 0.0, -lo1), (1.0, 0.0, hi1), (0.0, -1.0, -lo2), (0.0, 1.0, hi2)))

    @property
    def scale(self) -> float:
        return max([abs(b) for _, _, b in self.constraints] + [1.0])

    @property
    def tolerance(self) -> float:
        return REL_TOL * self.scale

    @cached_property
    def vertices(self) -> tuple:
        return tuple(polygon_vertices(self))

    def contains(self, s1, s2, tol: float | None = None):
        """Elementwise feasibility test, vectorised over arrays."""
        tol = self.tolerance if tol is None else tol
        s1 = np.asarray(s1, dtype=float)
        s2 = np.asarray(s2, dtype=float)
        ok = np.ones(np.broadcast(s1, s2).shape, dtype=bool)
        for a1, a2, b in self.constraints:
            ok &= a1 * s1 + a2 * s2 <= b + tol
        return ok if ok.shape else bool(ok)

    def bounding_box(self):
        v = np.array(self.vertices)
        return float(v[:, 0].min()), float(v[:, 0].max()), float(v[:, 1].min()), float(v[:, 1].max())

    def transposed(self) -> "FeasiblePolygon":
        """Mirror image under (s1, s2) -> (s2, s1)."""
        return FeasiblePolygon(tuple((a2, a1, b) for a1, a2, b in self.constraints))


def _unbounded(constraints) -> bool:
    # Nonempty {A s <= b} is bounded iff the recession cone {d : A d <= 0} is {0}.
    # In the plane a nonzero recession direction, if any, can be taken on a
    # constraint boundary line.
    normals = [(a1, a2) for a1, a2, _ in constraints if a1 != 0 or a2 != 0]
    if not normals:
        return True
    for a1, a2 in normals:
        n = math.hypot(a1, a2)
        for d in ((-a2 / n, a1 / n), (a2 / n, -a1 / n)):
            if all(c1 * d[0] + c2 * d[1] <= 1e-12 * math.hypot(c1, c2) for c1, c2 in normals):
                return True
    return False


def region_vertices(constraints: Sequence, tol: float, scale: float = 1.0) -> list:
    """Counterclockwise vertices of a bounded polygon given by half-planes.

    The region may be lower dimensional: a segment yields its two endpoints,
    a single point yields one vertex, an empty region yields []. Constraints
    with a zero normal are either vacuous or make the region empty.
    """
    live = []
    for a1, a2, b in constraints:
        if a1 == 0 and a2 == 0:
            if b < -tol:
                return []
            continue
        live.append((a1, a2, b))
    if _unbounded(live):
        raise GeometryError("unbounded_outcome_space", "outcome space is unbounded")

    pts = []
    for i in range(len(live)):
        a1, a2, b = live[i]
        for j in range(i + 1, len(live)):
            c1, c2, e = live[j]
            det = a1 * c2 - a2 * c1
            if abs(det) <= 1e-14 * math.hypot(a1, a2) * math.hypot(c1, c2):
                continue
            x = (b * c2 - a2 * e) / det
            y = (a1 * e - b * c1) / det
            if all(r1 * x + r2 * y <= rb + tol * max(1.0, math.hypot(r1, r2)) for r1, r2, rb in live):
                pts.append((x, y))
    return _order_ccw(pts, tol, scale)


def _order_ccw(pts, tol, scale):
    uniq = []
    for p in pts:
        if not any(abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol for q in uniq):
            uniq.append(p)
    if len(uniq) <= 2:
        return sorted(uniq)
    cx = sum(p[0] for p in uniq) / len(uniq)
    cy = sum(p[1] for p in uniq) / len(uniq)
    uniq.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
    # drop vertices that lie on the segment joining their neighbours
    changed = True
    while changed and len(uniq) > 2:
        changed = False
        for k in range(len(uniq)):
            p, q, r = uniq[k - 1], uniq[k], uniq[(k + 1) % len(uniq)]
            cross = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0])
            span = max(math.dist(p, q), math.dist(q, r), 1e-300)
            if abs(cross) <= tol * span:
                del uniq[k]
                changed = True
                break
    if len(uniq) == 2:
        return sorted(uniq)
    # start at the lowest-leftmost vertex for a canonical ordering
    start = min(range(len(uniq)), key=lambda k: (uniq[k][1], uniq[k][0]))
    return uniq[start:] + uniq[:start]


def polygon_vertices(poly: FeasiblePolygon) -> list:
    """Ordered (counterclockwise) vertices of a feasible polygon.

    Raises GeometryError with code ``empty_outcome_space`` or
    ``unbounded_outcome_space``.
    """
    verts = region_vertices(poly.constraints, poly.tolerance, poly.scale)
    if not verts:
        raise GeometryError("empty_outcome_space", "outcome space is empty")
    return verts


def polygon_area(vertices) -> float:
    """Shoelace area of a simple polygon; fewer than three vertices gives 0."""
    if len(vertices) < 3:
        return 0.0
    acc = 0.0
    n = len(vertices)
    for k in range(n):
        x0, y0 = vertices[k]
        x1, y1 = vertices[(k + 1) % n]
        acc += x0 * y1 - x1 * y0
    return abs(acc) / 2.0


def _efficient_edges(verts):
    """Edges whose outward normal is strictly positive in both coordinates."""
    edges = []
    n = len(verts)
    if n < 3:
        return edges
    for k in range(n):
        p, q = verts[k], verts[(k + 1) % n]
        # outward normal of a CCW edge p->q is (dy, -dx)
        nx, ny = q[1] - p[1], -(q[0] - p[0])
        if nx > 0 and ny > 0:
            edges.append((p, q))
    return edges


def efficient_frontier(poly: FeasiblePolygon, resolution: int) -> list:
    """Evenly spaced allocations along the Pareto-efficient boundary.

    Points run from the largest-s2 end to the largest-s1 end, endpoints
    included. If no edge is strictly efficient (e.g. a box) the single
    componentwise-maximal vertex is returned.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    verts = poly.vertices
    edges = _efficient_edges(verts)
    if not edges:
        best = max(verts, key=lambda v: (v[0] + v[1], v[0]))
        return [best]
    # CCW traversal visits efficient edges from large-s1 to large-s2; reverse it
    chain = [edges[0][0]]
    for p, q in edges:
        if chain[-1] != p:
            chain.append(p)
        chain.append(q)
    chain = chain[::-1]
    lengths = np.array([math.dist(chain[k], chain[k + 1]) for k in range(len(chain) - 1)])
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    out = []
    for t in np.linspace(0.0, cum[-1], resolution):
        k = min(int(np.searchsorted(cum, t, side="right")) - 1, len(lengths) - 1)
        frac = 0.0 if lengths[k] == 0 else (t - cum[k]) / lengths[k]
        p, q = chain[k], chain[k + 1]
        out.append((p[0] + frac * (q[0] - p[0]), p[1] + frac * (q[1] - p[1])))
    out[0], out[-1] = chain[0], chain[-1]
    return out
