"""First-workshop profiling game: teacher-paced hints, pair drafts, board.

The teacher releases one hint at a time; each pair iteratively refines a
profile draft of the mystery user; the board projects the latest draft of
every pair; the reveal shows the scripted solution.  Draft history is
append-only so the class can look back at how profiles evolved.

Scripts are data files (JSON, same envelope style as the manifest), so new
mystery-person storylines need no code changes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import GameError, ValidationError


@dataclass(frozen=True)
class Hint:
    id: str
    text: str
    prompts: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise ValidationError("id", "hint id must be non-empty")
        if not self.text:
            raise ValidationError("text", "hint text must be non-empty")
        object.__setattr__(self, "prompts", tuple(self.prompts))

    def to_dict(self) -> dict:
        return {"id": self.id, "text": self.text, "prompts": list(self.prompts)}


@dataclass(frozen=True)
class GameScript:
    title: str
    hints: tuple[Hint, ...]
    solution_attributes: dict[str, str]
    solution_narrative: str

    def __post_init__(self):
        if not self.title:
            raise ValidationError("title", "must be non-empty")
        object.__setattr__(self, "hints", tuple(self.hints))
        if not self.hints:
            raise ValidationError("hints", "script needs at least one hint")
        ids = [h.id for h in self.hints]
        if len(set(ids)) != len(ids):
            raise ValidationError("hints", "hint ids must be unique")

    @classmethod
    def from_dict(cls, doc: dict) -> "GameScript":
        try:
            hints = tuple(
                Hint(id=h["id"], text=h["text"], prompts=tuple(h.get("prompts", ())))
                for h in doc["hints"]
            )
            solution = doc["solution"]
            return cls(
                title=doc["title"],
                hints=hints,
                solution_attributes=dict(solution["attributes"]),
                solution_narrative=solution["narrative"],
            )
        except KeyError as exc:
            raise ValidationError("script", f"missing field {exc}") from exc

    @classmethod
    def load(cls, path) -> "GameScript":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def solution_dict(self) -> dict:
        return {
            "attributes": dict(self.solution_attributes),
            "narrative": self.solution_narrative,
        }


@dataclass(frozen=True)
class ProfileDraft:
    """One pair's profile of the mystery user; immutable once on the board."""

    pair_id: str
    fields: dict[str, str]
    tags: tuple[str, ...]
    version: int

    def __post_init__(self):
        if not self.pair_id:
            raise ValidationError("pair_id", "must be non-empty")
        if self.version < 1:
            raise ValidationError("version", "must be >= 1")
        object.__setattr__(self, "fields", dict(self.fields))
        object.__setattr__(self, "tags", tuple(self.tags))

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "fields": dict(self.fields),
            "tags": list(self.tags),
            "version": self.version,
        }


@dataclass
class GameState:
    """Per-room game progress; mutated only by the room's single writer."""

    script: GameScript
    hint_index: int = 0  # number of hints revealed so far
    drafts: dict[str, list[ProfileDraft]] = field(default_factory=dict)
    revealed: bool = False


def advance_hint(game: GameState) -> Hint:
    """Reveal the next hint; returns it. Index only ever moves by +1."""
    if game.hint_index >= len(game.script.hints):
        raise GameError("all hints already revealed")
    game.hint_index += 1
    return game.script.hints[game.hint_index - 1]


def submit_draft(
    game: GameState, pair_id: str, fields: dict[str, str], tags=()
) -> ProfileDraft:
    """Store a new draft version for the pair; prior versions are retained."""
    history = game.drafts.setdefault(pair_id, [])
    draft = ProfileDraft(
        pair_id=pair_id,
        fields=fields,
        tags=tuple(tags),
        version=len(history) + 1,
    )
    history.append(draft)
    return draft


def draft_history(game: GameState, pair_id: str) -> list[ProfileDraft]:
    return list(game.drafts.get(pair_id, []))


def publish_board(game: GameState) -> list[ProfileDraft]:
    """Latest draft of every pair, ordered by pair_id."""
    if not game.drafts:
        raise GameError("nothing to publish: no drafts submitted")
    return [game.drafts[pair_id][-1] for pair_id in sorted(game.drafts)]


def reveal(game: GameState) -> dict:
    game.revealed = True
    return game.script.solution_dict()
