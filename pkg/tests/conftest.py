import pytest

from deltanash import division_game

DELTA_GRID = [round(0.1 * k, 10) for k in range(1, 11)]
DELTA_GRID0 = [round(0.1 * k, 10) for k in range(0, 11)]


@pytest.fixture
def game():
    return division_game


def grid_pairs(values=DELTA_GRID):
    return [(a, b) for a in values for b in values]
