import pytest
from hypothesis import given
from hypothesis import strategies as st

from deltanash import FeasiblePolygon, GameSpec, GameValidationError, PlayerSpec, payoff, validate_game
from deltanash.expr import eval_value_expr

SECTION2 = {
    "budget": 100,
    "player1": {"utility": "s1", "distortion": "s1 - s2", "delta": 1},
    "player2": {"utility": "s2", "distortion": "s2 - s1", "delta": 1},
    "disagreement": {"payoffs": [0, 0]},
}


@pytest.mark.parametrize(
    "delta, point, value",
    [(1, (50, 50), 50), (0, (75, 25), 50), (0.5, (50, 50), 25)],
)
def test_payoff_examples(delta, point, value):
    assert payoff(PlayerSpec("s1", "s1 - s2", delta), *point) == value


@given(
    st.floats(0, 1),
    st.floats(0, 100),
    st.floats(0, 100),
    st.sampled_from(["s1", "s1 - s1^2/400", "min(s1, 2*s2)", "3*s1 - s2"]),
    st.sampled_from(["s1 - s2", "abs(s1 - s2)", "-s2", "max(s1, s2) - 20"]),
)
def test_decomposition(delta, s1, s2, u, d):
    p = PlayerSpec(u, d, delta)
    expected = delta * eval_value_expr(p.rational_value, s1, s2) + (1 - delta) * eval_value_expr(
        p.distortion_value, s1, s2
    )
    assert abs(payoff(p, s1, s2) - expected) <= 1e-12 * max(1.0, abs(expected))


def test_extreme_deltas_reduce_to_components():
    for s1 in range(0, 101, 10):
        for s2 in range(0, 101 - s1, 10):
            assert payoff(PlayerSpec("s1", "s1 - s2", 1), s1, s2) == s1
            assert payoff(PlayerSpec("s1", "s1 - s2", 0), s1, s2) == s1 - s2


def test_section2_spec_is_valid(game):
    g = validate_game(SECTION2)
    assert g.deltas == (1.0, 1.0)
    assert g.disagreement_point() == (0.0, 0.0)
    assert validate_game(game()) == game()


def test_delta_out_of_range():
    bad = {**SECTION2, "player1": {**SECTION2["player1"], "delta": 1.5}}
    with pytest.raises(GameValidationError, match="delta out of range") as info:
        validate_game(bad)
    assert info.value.codes == ["delta_out_of_range"]
    with pytest.raises(GameValidationError):
        PlayerSpec("s1", "s1", 1.5)


def test_threat_outside():
    bad = {**SECTION2, "disagreement": {"threats": [200, 0]}}
    with pytest.raises(GameValidationError, match="threat outside outcome space") as info:
        validate_game(bad)
    assert info.value.codes == ["threat_outside_outcome_space"]


def test_all_issues_reported_together():
    bad = {
        "budget": 100,
        "constraints": [],
        "player1": {"utility": "s3", "distortion": "s1", "delta": -1},
        "player2": {"utility": "s2", "distortion": "s2 - s1", "delta": 1, "colour": "red"},
        "disagreement": {"threats": [200, 0]},
    }
    with pytest.raises(GameValidationError) as info:
        validate_game(bad)
    codes = set(info.value.codes)
    assert {"mutually_exclusive_keys", "unparseable_expression", "delta_out_of_range", "unknown_key"} <= codes


def test_empty_and_unbounded_polygons():
    p = PlayerSpec("s1", "s1", 1)
    with pytest.raises(GameValidationError) as info:
        GameSpec(p, p, FeasiblePolygon(((-1, 0, 0), (0, -1, 0), (-1, -1, -200), (1, 1, 100))))
    assert info.value.codes == ["empty_outcome_space"]
    with pytest.raises(GameValidationError) as info:
        GameSpec(p, p, FeasiblePolygon(((-1, 0, 0), (0, -1, 0))))
    assert info.value.codes == ["unbounded_outcome_space"]


def test_threats_map_to_disagreement_payoffs():
    g = GameSpec(PlayerSpec("s1", "s1 - s2", 0.5), PlayerSpec("s2", "s2 - s1", 1), FeasiblePolygon.budget(100),
                 threats=(20, 10))
    assert g.disagreement_point() == (15.0, 10.0)


def test_swapped_game_mirrors_payoffs(game):
    g = game(0.3, 0.8)
    h = g.swapped()
    assert h.deltas == (0.8, 0.3)
    assert payoff(h.player1, 30, 60) == payoff(g.player2, 60, 30)
