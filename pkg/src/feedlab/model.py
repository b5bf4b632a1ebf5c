"""Immutable domain vocabulary shared by every feedlab engine.

Users, rooms, images, events, scores, profiles and recommendation slots.
All types are frozen dataclasses validated on construction; a violated
invariant raises :class:`~feedlab.errors.ValidationError` naming the field.

Events serialize to exactly one JSON line of the room log and parse back to
an equal value, which is what makes append-only replay possible.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, ValidationError

ROOM_CODE_RE = re.compile(r"^[A-Z0-9]{6}$")
PAIRING_CODE_RE = re.compile(r"^[0-9]{6}$")

EVENT_KINDS = (
    "view_dwell",
    "like",
    "unlike",
    "emoji",
    "comment",
    "share",
    "follow",
    "inactivity",
)
SHARE_SCOPES = ("private", "friends", "public")

# sanity cap on a single dwell trace: one hour
MAX_DWELL_MS = 3_600_000

# kinds that must carry an image reference; follow may, inactivity must not
IMAGE_REQUIRED_KINDS = frozenset(
    {"view_dwell", "like", "unlike", "emoji", "comment", "share"}
)


def check_user_id(value: str, field_name: str = "user") -> str:
    if not isinstance(value, str) or not value:
        raise ValidationError(field_name, "must be a non-empty string")
    return value


def check_image_id(value: str, field_name: str = "image") -> str:
    if not isinstance(value, str) or not value:
        raise ValidationError(field_name, "must be a non-empty string")
    return value


def check_room_code(value: str) -> str:
    if not isinstance(value, str) or not ROOM_CODE_RE.match(value):
        raise ValidationError("room", "must match [A-Z0-9]{6}")
    return value


def check_topic_label(value: str, field_name: str = "topic") -> str:
    if not isinstance(value, str) or not value:
        raise ValidationError(field_name, "must be a non-empty string")
    if value != value.strip() or value != value.lower():
        raise ValidationError(field_name, "must be lowercase and trimmed")
    return value


@dataclass(frozen=True)
class ImageItem:
    """A feed image with curated topic labels and a synthetic poster."""

    id: str
    source_path: str
    topics: tuple[str, ...]
    author: str

    def __post_init__(self):
        check_image_id(self.id, "id")
        if not self.source_path:
            raise ValidationError("source_path", "must be non-empty")
        if not self.topics:
            raise ValidationError("topics", "must be non-empty")
        object.__setattr__(self, "topics", tuple(self.topics))
        for t in self.topics:
            check_topic_label(t, "topics")
        if len(set(self.topics)) != len(self.topics):
            raise ValidationError("topics", "must be duplicate-free")
        check_user_id(self.author, "author")


@dataclass(frozen=True)
class Manifest:
    """The labeled image corpus served to a room."""

    images: tuple[ImageItem, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        seen: set[str] = set()
        for img in self.images:
            if img.id in seen:
                raise ValidationError("images", f"duplicate image id {img.id!r}")
            seen.add(img.id)

    def __len__(self) -> int:
        return len(self.images)

    def by_id(self, image_id: str) -> ImageItem:
        for img in self.images:
            if img.id == image_id:
                return img
        raise KeyError(image_id)

    @property
    def ids(self) -> frozenset[str]:
        return frozenset(img.id for img in self.images)

    @property
    def topic_set(self) -> frozenset[str]:
        return frozenset(t for img in self.images for t in img.topics)

    def to_dict(self) -> dict:
        return {
            "images": [
                {
                    "id": img.id,
                    "path": img.source_path,
                    "topics": list(img.topics),
                    "author": img.author,
                }
                for img in self.images
            ]
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Manifest":
        if not isinstance(doc, dict) or "images" not in doc:
            raise ValidationError("images", "manifest document must contain 'images'")
        images = []
        for entry in doc["images"]:
            try:
                images.append(
                    ImageItem(
                        id=entry["id"],
                        source_path=entry["path"],
                        topics=tuple(entry["topics"]),
                        author=entry.get("author", "curator"),
                    )
                )
            except KeyError as exc:
                raise ValidationError("images", f"missing field {exc}") from exc
        return cls(images=tuple(images))

    @classmethod
    def load(cls, path) -> "Manifest":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class GivenData:
    """Information a user volunteers explicitly at sign-up."""

    user: str
    nickname: str
    grade_band: Optional[str] = None
    declared_interests: tuple[str, ...] = ()

    def __post_init__(self):
        check_user_id(self.user, "user")
        if not self.nickname:
            raise ValidationError("nickname", "must be non-empty")
        if self.grade_band is not None and self.grade_band not in ("g5", "g8", "other"):
            raise ValidationError("grade_band", "must be one of g5, g8, other")
        object.__setattr__(self, "declared_interests", tuple(self.declared_interests))
        for t in self.declared_interests:
            check_topic_label(t, "declared_interests")

    def validate_against(self, manifest: "Manifest") -> "GivenData":
        unknown = set(self.declared_interests) - manifest.topic_set
        if unknown:
            raise ValidationError(
                "declared_interests",
                f"not in manifest topics: {', '.join(sorted(unknown))}",
            )
        return self


# Ordered field layout of one log line.  Optional fields are omitted from the
# serialized object when absent so a line carries exactly the fields its kind
# requires.
_EVENT_OPTIONAL_FIELDS = (
    "image",
    "dwell_ms",
    "emoji_code",
    "comment_len",
    "share_scope",
    "followee",
    "gap_ms",
)


@dataclass(frozen=True)
class EventRecord:
    """One timestamped user action in a room's append-only log."""

    seq: int
    room: str
    user: str
    ts_server: int
    kind: str
    image: Optional[str] = None
    dwell_ms: Optional[int] = None
    emoji_code: Optional[str] = None
    comment_len: Optional[int] = None
    share_scope: Optional[str] = None
    followee: Optional[str] = None
    gap_ms: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.seq, int) or self.seq < 1:
            raise ValidationError("seq", "must be a positive integer")
        check_room_code(self.room)
        check_user_id(self.user, "user")
        if not isinstance(self.ts_server, int) or self.ts_server < 0:
            raise ValidationError("ts_server", "must be a non-negative integer")
        if self.kind not in EVENT_KINDS:
            raise ValidationError("kind", f"unknown kind {self.kind!r}")
        self._check_kind_fields()

    def _check_kind_fields(self):
        kind = self.kind
        if kind in IMAGE_REQUIRED_KINDS and self.image is None:
            raise ValidationError("image", f"required for kind {kind!r}")
        if kind == "inactivity" and self.image is not None:
            raise ValidationError("image", "not allowed for inactivity")
        if self.image is not None:
            check_image_id(self.image, "image")

        required = {
            "view_dwell": ("dwell_ms",),
            "emoji": ("emoji_code",),
            "comment": ("comment_len",),
            "share": ("share_scope",),
            "follow": ("followee",),
            "inactivity": ("gap_ms",),
        }.get(kind, ())
        allowed = set(required) | ({"image"} if kind != "inactivity" else set())
        for name in required:
            if getattr(self, name) is None:
                raise ValidationError(name, f"required for kind {kind!r}")
        for name in _EVENT_OPTIONAL_FIELDS:
            if name == "image":
                continue
            if getattr(self, name) is not None and name not in allowed:
                raise ValidationError(name, f"not allowed for kind {kind!r}")

        if self.dwell_ms is not None:
            if not isinstance(self.dwell_ms, int) or self.dwell_ms < 0:
                raise ValidationError("dwell_ms", "must be a non-negative integer")
            if self.dwell_ms > MAX_DWELL_MS:
                raise ValidationError("dwell_ms", f"exceeds sanity cap {MAX_DWELL_MS}")
        if self.emoji_code is not None and not (
            isinstance(self.emoji_code, str) and 0 < len(self.emoji_code) <= 16
        ):
            raise ValidationError("emoji_code", "must be a short non-empty string")
        if self.comment_len is not None and (
            not isinstance(self.comment_len, int) or self.comment_len < 0
        ):
            raise ValidationError("comment_len", "must be a non-negative integer")
        if self.share_scope is not None and self.share_scope not in SHARE_SCOPES:
            raise ValidationError("share_scope", f"must be one of {SHARE_SCOPES}")
        if self.followee is not None:
            check_user_id(self.followee, "followee")
        if self.gap_ms is not None and (
            not isinstance(self.gap_ms, int) or self.gap_ms <= 0
        ):
            raise ValidationError("gap_ms", "must be a positive integer")

    def to_dict(self) -> dict:
        doc = {
            "seq": self.seq,
            "room": self.room,
            "user": self.user,
            "ts_server": self.ts_server,
            "kind": self.kind,
        }
        for name in _EVENT_OPTIONAL_FIELDS:
            value = getattr(self, name)
            if value is not None:
                doc[name] = value
        return doc

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: dict) -> "EventRecord":
        known = {"seq", "room", "user", "ts_server", "kind", *_EVENT_OPTIONAL_FIELDS}
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(sorted(unknown)[0], "unknown event field")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ValidationError("event", str(exc)) from exc

    @classmethod
    def from_json_line(cls, line: str) -> "EventRecord":
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ParseError("event line must be a JSON object")
        return cls.from_dict(doc)


@dataclass(frozen=True)
class EngagementCell:
    """Accumulated engagement of one user on one image, split by event kind."""

    user: str
    image: str
    score: float
    components: tuple[tuple[str, float], ...]

    def __post_init__(self):
        check_user_id(self.user, "user")
        check_image_id(self.image, "image")
        object.__setattr__(self, "components", tuple(self.components))
        total = 0.0
        for kind, value in self.components:
            if kind not in EVENT_KINDS:
                raise ValidationError("components", f"unknown kind {kind!r}")
            if value < 0:
                raise ValidationError("components", f"{kind} component negative")
            total += value
        if abs(total - self.score) > 1e-9:
            raise ValidationError("score", "must equal the sum of components")
        if self.score < 0:
            raise ValidationError("score", "must be non-negative")

    def component(self, kind: str) -> float:
        for k, v in self.components:
            if k == kind:
                return v
        return 0.0


@dataclass(frozen=True)
class AffinityProfile:
    """A user's normalized topic-affinity vector; source of the word cloud."""

    user: str
    affinities: dict[str, float] = field(default_factory=dict)
    total_engagement: float = 0.0

    def __post_init__(self):
        check_user_id(self.user, "user")
        if self.total_engagement < 0:
            raise ValidationError("total_engagement", "must be non-negative")
        object.__setattr__(self, "affinities", dict(self.affinities))
        for topic, value in self.affinities.items():
            check_topic_label(topic, "affinities")
            if not (0.0 <= value <= 1.0 + 1e-9):
                raise ValidationError("affinities", f"{topic} outside [0, 1]")
        if self.total_engagement > 0:
            if abs(sum(self.affinities.values()) - 1.0) > 1e-9:
                raise ValidationError("affinities", "must sum to 1")
        elif self.affinities:
            raise ValidationError(
                "affinities", "must be empty when total_engagement is 0"
            )

    def affinity(self, topic: str) -> float:
        return self.affinities.get(topic, 0.0)

    def to_dict(self) -> dict:
        return {
            "user": self.user,
            "affinities": {t: self.affinities[t] for t in sorted(self.affinities)},
            "total": self.total_engagement,
        }


@dataclass(frozen=True)
class RecommendationSlot:
    """One queued image plus the explanation of why it was chosen."""

    image: str
    score: float
    content_part: float
    collab_part: float
    popularity_part: float
    explain_topics: tuple[tuple[str, float], ...] = ()
    explain_users: tuple[tuple[str, float, float], ...] = ()
    explored: bool = False

    def __post_init__(self):
        check_image_id(self.image, "image")
        object.__setattr__(self, "explain_topics", tuple(self.explain_topics))
        object.__setattr__(self, "explain_users", tuple(self.explain_users))
        if len(self.explain_topics) > 3:
            raise ValidationError("explain_topics", "at most 3 entries")
        if len(self.explain_users) > 3:
            raise ValidationError("explain_users", "at most 3 entries")
        contribs = [c for _, c in self.explain_topics]
        if contribs != sorted(contribs, reverse=True):
            raise ValidationError(
                "explain_topics", "must be sorted by contribution descending"
            )
        user_contribs = [s * e for _, s, e in self.explain_users]
        if user_contribs != sorted(user_contribs, reverse=True):
            raise ValidationError(
                "explain_users", "must be sorted by contribution descending"
            )

    def to_dict(self) -> dict:
        return {
            "image": self.image,
            "score": self.score,
            "content_part": self.content_part,
            "collab_part": self.collab_part,
            "popularity_part": self.popularity_part,
            "explain_topics": [[t, c] for t, c in self.explain_topics],
            "explain_users": [[u, s, e] for u, s, e in self.explain_users],
            "explored": self.explored,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RecommendationSlot":
        return cls(
            image=doc["image"],
            score=doc["score"],
            content_part=doc["content_part"],
            collab_part=doc["collab_part"],
            popularity_part=doc["popularity_part"],
            explain_topics=tuple((t, c) for t, c in doc["explain_topics"]),
            explain_users=tuple((u, s, e) for u, s, e in doc["explain_users"]),
            explored=doc["explored"],
        )
