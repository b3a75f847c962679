import numpy as np
import pytest
import shapely
from shapely.geometry import Polygon, box

from deltanash import FeasiblePolygon, GameSpec, PlayerSpec, bargaining_area, bargaining_set, payoff_image
from deltanash.bargaining import bargaining_set_csv, counted_cell_area
from deltanash.tabular import read_csv

from conftest import DELTA_GRID0


def exact_area_oracle(d1, d2, budget=100.0):
    """Image of the simplex under the affine payoff map, clipped to the quadrant."""
    A = np.array([[1.0, -(1 - d1)], [-(1 - d2), 1.0]])
    tri = [tuple(A @ v) for v in ([0, 0], [budget, 0], [0, budget])]
    img = Polygon(tri)
    if not img.is_valid or img.area == 0:
        return 0.0
    big = 10 * budget
    return img.intersection(box(0, 0, big, big)).area


def test_payoff_image_identity_at_full_rationality(game):
    cloud = payoff_image(game(1, 1), 41)
    assert np.array_equal(cloud.p1, cloud.s1)
    assert np.array_equal(cloud.p2, cloud.s2)
    assert np.all(cloud.s1 + cloud.s2 <= 100 + 1e-7)


def test_payoff_image_antisymmetric_when_irrational(game):
    cloud = payoff_image(game(0, 0), 41)
    assert np.array_equal(cloud.p1, -cloud.p2)


def test_payoff_image_point(game):
    cloud = payoff_image(game(0.5, 0.5), 3)
    k = np.flatnonzero((cloud.s1 == 50) & (cloud.s2 == 50))
    assert k.size == 1
    assert (cloud.p1[k[0]], cloud.p2[k[0]]) == (25, 25)


def test_payoff_image_row_major(game):
    cloud = payoff_image(game(1, 1), 3)
    assert list(zip(cloud.s1, cloud.s2)) == [(0, 0), (0, 50), (0, 100), (50, 0), (50, 50), (100, 0)]


def test_full_rationality_triangle(game):
    b = bargaining_set(game(1, 1))
    assert b.boundary == ((0, 0), (100, 0), (0, 100))
    assert b.area == 5000
    assert not b.is_degenerate


def test_irrational_set_is_degenerate(game):
    b = bargaining_set(game(0, 0))
    assert b.is_degenerate
    assert b.area == 0
    assert np.all(np.abs(b.cloud.p1) <= 1e-7) and np.all(np.abs(b.cloud.p2) <= 1e-7)


def test_half_rational_area(game):
    assert exact_area_oracle(0.5, 0.5) == pytest.approx(1250, abs=1e-9)
    assert bargaining_set(game(0.5, 0.5)).area == pytest.approx(1250, abs=1e-6)


@pytest.mark.parametrize("d1", DELTA_GRID0)
@pytest.mark.parametrize("d2", DELTA_GRID0)
def test_area_matches_polygon_oracle(game, d1, d2):
    assert bargaining_area(game(d1, d2)) == pytest.approx(exact_area_oracle(d1, d2), abs=1e-6)


def test_area_monotone_on_grid(game):
    area = {(a, b): bargaining_area(game(a, b)) for a in DELTA_GRID0 for b in DELTA_GRID0}
    for i in range(len(DELTA_GRID0) - 1):
        for b in DELTA_GRID0:
            lo, hi = DELTA_GRID0[i], DELTA_GRID0[i + 1]
            assert area[(hi, b)] >= area[(lo, b)] - 1e-9
            assert area[(b, hi)] >= area[(b, lo)] - 1e-9


def test_sets_are_nested_as_rationality_drops(game):
    # containment, not just area: lower deltas give a subset of the payoff region
    big = Polygon(bargaining_set(game(0.8, 0.9), 20).boundary)
    small = Polygon(bargaining_set(game(0.4, 0.6), 20).boundary)
    assert big.buffer(1e-7).contains(small)


@pytest.mark.parametrize("deltas", [(1, 1), (0.5, 0.5)])
def test_counted_cells_close_to_exact(game, deltas):
    g = game(*deltas)
    exact = bargaining_set(g).area
    assert counted_cell_area(g, 400) == pytest.approx(exact, rel=0.02)


def test_members_dominate_disagreement(game):
    for deltas in [(1, 1), (0.3, 0.7), (0, 1), (0.5, 0.5)]:
        b = bargaining_set(game(*deltas), 101)
        assert np.all(b.cloud.p1 >= -1e-7) and np.all(b.cloud.p2 >= -1e-7)


def test_frontier_mutually_nondominated(game):
    for deltas in [(1, 1), (0.3, 0.7)]:
        b = bargaining_set(game(*deltas), 60)
        front = b.pareto_frontier
        for p in front:
            for q in front:
                if p != q:
                    assert not (q[0] >= p[0] and q[1] >= p[1])


def test_single_zero_delta_is_not_a_singleton(game):
    # brute force: (75, 25) gives payoffs (50, 25) when delta = (0, 1)
    b = bargaining_set(game(0, 1), 401)
    hit = (b.cloud.s1 == 75) & (b.cloud.s2 == 25)
    assert hit.sum() == 1
    assert (b.cloud.p1[hit][0], b.cloud.p2[hit][0]) == (50, 25)
    assert not b.is_degenerate
    assert b.area == pytest.approx(2500)
    assert b.paper_boundary_claim_mismatch


def nonlinear_game():
    return GameSpec(
        PlayerSpec("s1 - s1^2/400", "s1 - min(s2, 60)", 0.7),
        PlayerSpec("2*s2 - s2^2/100", "s2 - abs(s1 - 20)", 0.9),
        FeasiblePolygon(((-1, 0, 0), (0, -1, 0), (1, 1, 100), (1, 0, 80))),
        threats=(10, 10),
    )


def test_nonlinear_set_uses_raster():
    b = bargaining_set(nonlinear_game(), 120)
    assert not b.exact and b.boundary is None
    d = b.disagreement
    assert np.all(b.cloud.p1 >= d[0] - 1e-7) and np.all(b.cloud.p2 >= d[1] - 1e-7)
    assert b.area > 0


def test_nonlinear_area_converges():
    g = nonlinear_game()
    a, b = counted_cell_area(g, 200), counted_cell_area(g, 800)
    assert a == pytest.approx(b, rel=0.02)


def test_nonaffine_representation_of_affine_game_agrees():
    # "s1^1" defeats the structural affine test, forcing the raster path
    g = GameSpec(PlayerSpec("s1^1", "s1 - s2", 0.5), PlayerSpec("s2", "s2 - s1", 0.5), FeasiblePolygon.budget(100))
    b = bargaining_set(g, 400)
    assert not b.exact
    assert b.area == pytest.approx(1250, rel=0.02)


def test_csv_export_round_trip(game):
    b = bargaining_set(game(0.5, 0.5), 11)
    header, rows = read_csv(bargaining_set_csv(b))
    assert header == ["s1", "s2", "p1", "p2"]
    assert len(rows) == len(b.cloud)
    got = np.array(rows, dtype=float)
    assert np.allclose(got[:, 0], b.cloud.s1) and np.allclose(got[:, 3], b.cloud.p2)
