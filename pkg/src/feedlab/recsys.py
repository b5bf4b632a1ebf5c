"""Explainable next-5 recommendation queues.

Each slot's score blends three channels: the user's own topic profile
(content), what similar users engaged with (collaborative), and room-wide
popularity.  The blend weights are room config; demonstrating the
collaborative channel is the whole pedagogical point, so every slot carries
the top contributing topics and the top similar users as its explanation.

Exploration is a per-slot Bernoulli draw from a deterministic stream keyed
by (seed, room, user, seq): replays reproduce queues exactly.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from functools import cached_property

from .errors import ConfigurationError, ValidationError
from .model import AffinityProfile, ImageItem, Manifest, RecommendationSlot
from .profiling import cosine_similarity


@dataclass(frozen=True)
class RecConfig:
    alpha: float = 0.5
    beta: float = 0.4
    gamma: float = 0.1
    epsilon_explore: float = 0.1
    exclude_window: int = 50
    queue_len: int = 5
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "epsilon_explore"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValidationError(name, "must lie in [0, 1]")
        if abs(self.alpha + self.beta + self.gamma - 1.0) > 1e-9:
            raise ValidationError("alpha", "alpha + beta + gamma must equal 1")
        if self.queue_len < 1:
            raise ValidationError("queue_len", "must be >= 1")
        if self.exclude_window < 0:
            raise ValidationError("exclude_window", "must be >= 0")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "epsilon_explore": self.epsilon_explore,
            "exclude_window": self.exclude_window,
            "queue_len": self.queue_len,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RecConfig":
        return cls(**doc)


@dataclass(frozen=True)
class RoomSnapshot:
    """Everything the ranking needs, frozen at one log position.

    ``cells`` holds raw engagement scores keyed by (user, image);
    ``impressions`` lists the images served to each user, oldest first.
    """

    room: str
    seq: int
    manifest: Manifest
    profiles: dict[str, AffinityProfile] = field(default_factory=dict)
    cells: dict[tuple[str, str], float] = field(default_factory=dict)
    impressions: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def engagement(self, user: str, image: str) -> float:
        return self.cells.get((user, image), 0.0)

    @cached_property
    def max_cell_score(self) -> float:
        return max(self.cells.values(), default=0.0)

    @cached_property
    def _image_totals(self) -> dict[str, float]:
        totals: dict[str, float] = {}
        for (_, img), score in sorted(self.cells.items()):
            totals[img] = totals.get(img, 0.0) + score
        return totals

    def image_total(self, image: str) -> float:
        return self._image_totals.get(image, 0.0)

    def popularity(self, image: str) -> float:
        """Total engagement on the image over the room maximum, in [0, 1]."""
        top = max(self._image_totals.values(), default=0.0)
        if top <= 0:
            return 0.0
        return self._image_totals.get(image, 0.0) / top


def content_score(profile: AffinityProfile, image: ImageItem) -> float:
    """Mean affinity over the image's topics; missing topics count 0."""
    if not image.topics:
        raise ValidationError("topics", "image topics must be non-empty")
    total = 0.0
    for topic in image.topics:
        total += profile.affinity(topic)
    return total / len(image.topics)


def neighbor_similarities(user: str, snapshot: RoomSnapshot) -> dict[str, float]:
    """Profile similarity of ``user`` to every other engaged user."""
    own = snapshot.profiles.get(user)
    if own is None:
        own = AffinityProfile(user=user)
    sims: dict[str, float] = {}
    for other in sorted(snapshot.profiles):
        if other == user:
            continue
        profile = snapshot.profiles[other]
        if profile.total_engagement <= 0:
            continue
        sims[other] = cosine_similarity(own, profile)
    return sims


def collab_score(
    user: str,
    image: str,
    snapshot: RoomSnapshot,
    sims: dict[str, float] | None = None,
) -> float:
    """Similarity-weighted average of neighbors' normalized engagement.

    The per-room engagement is min-max normalized (absent cells are 0, so
    the floor is 0 and the scale is the room's top cell score); one
    hyperactive user therefore cannot saturate everyone's queues.
    """
    if sims is None:
        sims = neighbor_similarities(user, snapshot)
    if not sims:
        return 0.0
    top = snapshot.max_cell_score
    num = 0.0
    denom = 0.0
    for other in sorted(sims):
        sim = sims[other]
        denom += sim
        if top > 0:
            num += sim * (snapshot.engagement(other, image) / top)
    return num / max(denom, 1e-9)


def _slot_rng(cfg: RecConfig, room: str, user: str, seq: int) -> random.Random:
    key = f"{cfg.rng_seed}:{room}:{user}:{seq}".encode()
    seed = int.from_bytes(hashlib.sha256(key).digest()[:8], "big")
    return random.Random(seed)


@dataclass(frozen=True)
class _Scored:
    image: ImageItem
    score: float
    content: float
    collab: float
    popularity: float


def _rank(entries: list[_Scored]) -> list[_Scored]:
    return sorted(entries, key=lambda e: (-e.score, e.image.id))


def _make_slot(
    entry: _Scored,
    explored: bool,
    profile: AffinityProfile,
    sims: dict[str, float],
    snapshot: RoomSnapshot,
) -> RecommendationSlot:
    image = entry.image
    topic_contribs = []
    for topic in image.topics:
        aff = profile.affinity(topic)
        if aff > 0:
            topic_contribs.append((topic, aff / len(image.topics)))
    topic_contribs.sort(key=lambda tc: (-tc[1], tc[0]))

    user_contribs = []
    for other in sorted(sims):
        sim = sims[other]
        their = snapshot.engagement(other, image.id)
        if sim > 0 and their > 0:
            user_contribs.append((other, sim, their))
    user_contribs.sort(key=lambda use: (-(use[1] * use[2]), use[0]))

    return RecommendationSlot(
        image=image.id,
        score=entry.score,
        content_part=entry.content,
        collab_part=entry.collab,
        popularity_part=entry.popularity,
        explain_topics=tuple(topic_contribs[:3]),
        explain_users=tuple(user_contribs[:3]),
        explored=explored,
    )


def next_queue(
    user: str, snapshot: RoomSnapshot, cfg: RecConfig
) -> list[RecommendationSlot]:
    """The user's next ``cfg.queue_len`` recommendations with explanations.

    Candidates exclude the user's last ``exclude_window`` impressions; if the
    exclusion empties the pool (at the start or mid-queue), it resets to the
    whole manifest minus the images already chosen for this queue.
    """
    manifest = snapshot.manifest
    if len(manifest) == 0:
        raise ConfigurationError("manifest is empty")

    profile = snapshot.profiles.get(user) or AffinityProfile(user=user)
    sims = neighbor_similarities(user, snapshot)

    scored = []
    for image in manifest.images:
        c = content_score(profile, image)
        b = collab_score(user, image.id, snapshot, sims=sims)
        p = snapshot.popularity(image.id)
        s = cfg.alpha * c + cfg.beta * b + cfg.gamma * p
        scored.append(_Scored(image=image, score=s, content=c, collab=b, popularity=p))
    ranked_all = _rank(scored)

    served = snapshot.impressions.get(user, ())
    window = served[-cfg.exclude_window :] if cfg.exclude_window > 0 else ()
    excluded = set(window)
    remaining = [e for e in ranked_all if e.image.id not in excluded]

    rng = _slot_rng(cfg, snapshot.room, user, snapshot.seq)
    slots: list[RecommendationSlot] = []
    chosen: set[str] = set()
    want = min(cfg.queue_len, len(manifest))
    for _ in range(want):
        if not remaining:
            remaining = [e for e in ranked_all if e.image.id not in chosen]
        explored = rng.random() < cfg.epsilon_explore
        index = rng.randrange(len(remaining)) if explored else 0
        entry = remaining.pop(index)
        chosen.add(entry.image.id)
        slots.append(_make_slot(entry, explored, profile, sims, snapshot))
    return slots
