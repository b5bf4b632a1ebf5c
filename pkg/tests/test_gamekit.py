import pytest

from feedlab.errors import GameError, ValidationError
from feedlab.gamekit import (
    GameScript,
    GameState,
    Hint,
    advance_hint,
    draft_history,
    publish_board,
    reveal,
    submit_draft,
)

from .conftest import FIXTURES


def sample_script(n_hints=3):
    return GameScript(
        title="test mystery",
        hints=tuple(
            Hint(id=f"h{i}", text=f"hint {i}", prompts=(f"why {i}?",))
            for i in range(1, n_hints + 1)
        ),
        solution_attributes={"age": "13"},
        solution_narrative="a made-up person",
    )


class TestGameScript:
    def test_needs_at_least_one_hint(self):
        with pytest.raises(ValidationError):
            GameScript(
                title="t", hints=(), solution_attributes={}, solution_narrative="n"
            )

    def test_hint_ids_unique(self):
        h = Hint(id="h1", text="x")
        with pytest.raises(ValidationError):
            GameScript(
                title="t",
                hints=(h, h),
                solution_attributes={},
                solution_narrative="n",
            )

    def test_sample_fixture_loads(self):
        script = GameScript.load(FIXTURES / "game_script_sample.json")
        assert len(script.hints) == 3
        assert script.solution_attributes


class TestHints:
    def test_advance_moves_index_by_one(self):
        game = GameState(script=sample_script())
        hint = advance_hint(game)
        assert game.hint_index == 1
        assert hint.id == "h1"

    def test_advance_past_last_is_error(self):
        game = GameState(script=sample_script(1))
        advance_hint(game)
        with pytest.raises(GameError):
            advance_hint(game)

    def test_index_monotone(self):
        game = GameState(script=sample_script())
        seen = [game.hint_index]
        for _ in range(3):
            advance_hint(game)
            seen.append(game.hint_index)
        assert seen == [0, 1, 2, 3]


class TestDrafts:
    def test_versions_increment(self):
        game = GameState(script=sample_script())
        assert submit_draft(game, "pair1", {"name": "X"}).version == 1
        assert submit_draft(game, "pair1", {"name": "Y"}).version == 2
        assert submit_draft(game, "pair1", {"name": "Z"}).version == 3
        history = draft_history(game, "pair1")
        assert [d.version for d in history] == [1, 2, 3]
        assert [d.fields["name"] for d in history] == ["X", "Y", "Z"]

    def test_board_shows_latest_per_pair(self):
        game = GameState(script=sample_script())
        for pair in ("p3", "p1", "p2"):
            submit_draft(game, pair, {"guess": f"{pair}-v1"})
        submit_draft(game, "p1", {"guess": "p1-v2"})
        board = publish_board(game)
        assert [d.pair_id for d in board] == ["p1", "p2", "p3"]
        assert board[0].fields["guess"] == "p1-v2"
        assert board[0].version == 2

    def test_publish_before_any_draft_is_error(self):
        game = GameState(script=sample_script())
        with pytest.raises(GameError):
            publish_board(game)

    def test_reveal_returns_solution(self):
        game = GameState(script=sample_script())
        solution = reveal(game)
        assert solution["attributes"] == {"age": "13"}
        assert game.revealed
