"""Fold an event log into per-(user, image) engagement scores.

This is the tracking stage made visible on the paired analytics device:
every logged action moves exactly one (user, image) cell, and replaying the
same log always reproduces bit-identical tables.

Scoring rules
-------------
* dwell credit accumulates as ``w_dwell * min(total_dwell_ms, cap) / cap``,
  so a single long stare cannot dominate a profile;
* ``like`` sets the like component to ``w_like``; ``unlike`` resets it to 0;
* emoji / comment / share add their weight once per event (share weight
  depends on scope);
* ``follow`` with an image context adds ``w_follow`` to that image's cell,
  without context it only feeds the social graph;
* ``inactivity`` is logged and displayed but contributes zero score.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import SequenceError, UnknownReferenceError, ValidationError
from .model import EngagementCell, EventRecord

# fixed component order keeps score summation deterministic
COMPONENT_KINDS = ("view_dwell", "like", "emoji", "comment", "share", "follow")


@dataclass(frozen=True)
class WeightTable:
    """Per-interaction score weights; room config, not code.

    Defaults order stronger social commitments higher: comment > like >
    capped dwell, and public share > friends > private.
    """

    w_dwell: float = 1.0
    dwell_cap_ms: int = 10_000
    w_like: float = 2.0
    w_emoji: float = 1.5
    w_comment: float = 3.0
    w_share_private: float = 2.0
    w_share_friends: float = 3.0
    w_share_public: float = 4.0
    w_follow: float = 2.5

    def __post_init__(self):
        for name in (
            "w_dwell",
            "w_like",
            "w_emoji",
            "w_comment",
            "w_share_private",
            "w_share_friends",
            "w_share_public",
            "w_follow",
        ):
            if getattr(self, name) < 0:
                raise ValidationError(name, "weights must be non-negative")
        if self.dwell_cap_ms <= 0:
            raise ValidationError("dwell_cap_ms", "must be positive")

    def share_weight(self, scope: str) -> float:
        return {
            "private": self.w_share_private,
            "friends": self.w_share_friends,
            "public": self.w_share_public,
        }[scope]

    def to_dict(self) -> dict:
        return {
            "w_dwell": self.w_dwell,
            "dwell_cap_ms": self.dwell_cap_ms,
            "w_like": self.w_like,
            "w_emoji": self.w_emoji,
            "w_comment": self.w_comment,
            "w_share_private": self.w_share_private,
            "w_share_friends": self.w_share_friends,
            "w_share_public": self.w_share_public,
            "w_follow": self.w_follow,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "WeightTable":
        return cls(**doc)


@dataclass(frozen=True)
class _Cell:
    """Mutable-in-spirit accumulator for one (user, image) pair.

    ``dwell_ms_total`` is kept as an integer so the capped dwell credit is an
    exact function of the accumulated milliseconds, independent of how the
    dwell arrived in separate events.
    """

    dwell_ms_total: int = 0
    like: float = 0.0
    emoji: float = 0.0
    comment: float = 0.0
    share: float = 0.0
    follow: float = 0.0

    def components(self, weights: WeightTable) -> tuple[tuple[str, float], ...]:
        capped = min(self.dwell_ms_total, weights.dwell_cap_ms)
        dwell = weights.w_dwell * capped / weights.dwell_cap_ms
        return (
            ("view_dwell", dwell),
            ("like", self.like),
            ("emoji", self.emoji),
            ("comment", self.comment),
            ("share", self.share),
            ("follow", self.follow),
        )

    def score(self, weights: WeightTable) -> float:
        total = 0.0
        for _, value in self.components(weights):
            total += value
        return total


@dataclass(frozen=True)
class EngagementState:
    """Immutable snapshot of a room's engagement fold.

    ``cells`` maps user -> image -> accumulator.  ``apply_event`` returns a
    new state sharing untouched sub-dicts, so readers can hold old snapshots
    while the single room writer advances.
    """

    room: str
    known_images: frozenset[str]
    last_seq: int = 0
    cells: dict[str, dict[str, _Cell]] = field(default_factory=dict)
    last_active: dict[str, int] = field(default_factory=dict)


def initial_state(room: str, image_ids) -> EngagementState:
    return EngagementState(room=room, known_images=frozenset(image_ids))


def apply_event(
    state: EngagementState, ev: EventRecord, weights: WeightTable
) -> EngagementState:
    """Fold one event into the state; changes at most one cell."""
    if ev.seq <= state.last_seq:
        raise SequenceError(
            f"event seq {ev.seq} not greater than last applied {state.last_seq}"
        )
    if ev.image is not None and ev.image not in state.known_images:
        raise UnknownReferenceError(f"unknown image {ev.image!r}")

    last_active = dict(state.last_active)
    last_active[ev.user] = ev.ts_server

    if ev.kind == "inactivity" or (ev.kind == "follow" and ev.image is None):
        return replace(state, last_seq=ev.seq, last_active=last_active)

    user_cells = dict(state.cells.get(ev.user, {}))
    cell = user_cells.get(ev.image, _Cell())

    if ev.kind == "view_dwell":
        cell = replace(cell, dwell_ms_total=cell.dwell_ms_total + ev.dwell_ms)
    elif ev.kind == "like":
        cell = replace(cell, like=weights.w_like)
    elif ev.kind == "unlike":
        cell = replace(cell, like=0.0)
    elif ev.kind == "emoji":
        cell = replace(cell, emoji=cell.emoji + weights.w_emoji)
    elif ev.kind == "comment":
        cell = replace(cell, comment=cell.comment + weights.w_comment)
    elif ev.kind == "share":
        cell = replace(cell, share=cell.share + weights.share_weight(ev.share_scope))
    elif ev.kind == "follow":
        cell = replace(cell, follow=cell.follow + weights.w_follow)

    user_cells[ev.image] = cell
    cells = dict(state.cells)
    cells[ev.user] = user_cells
    return replace(state, last_seq=ev.seq, cells=cells, last_active=last_active)


def fold(state: EngagementState, events, weights: WeightTable) -> EngagementState:
    for ev in events:
        state = apply_event(state, ev, weights)
    return state


def engagement_table(
    state: EngagementState, weights: WeightTable
) -> list[EngagementCell]:
    """All cells with positive score, sorted by (user, image)."""
    out = []
    for user in sorted(state.cells):
        for image in sorted(state.cells[user]):
            cell = state.cells[user][image]
            score = cell.score(weights)
            if score > 0:
                out.append(
                    EngagementCell(
                        user=user,
                        image=image,
                        score=score,
                        components=cell.components(weights),
                    )
                )
    return out


def user_cells(
    state: EngagementState, user: str, weights: WeightTable
) -> list[EngagementCell]:
    """One user's positive cells, sorted by image."""
    out = []
    for image in sorted(state.cells.get(user, {})):
        cell = state.cells[user][image]
        score = cell.score(weights)
        if score > 0:
            out.append(
                EngagementCell(
                    user=user,
                    image=image,
                    score=score,
                    components=cell.components(weights),
                )
            )
    return out
