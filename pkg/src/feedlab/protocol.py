"""JSON wire protocol between clients and the room service.

Every message is a single JSON object with a top-level "type".  Parsing is
strict but never fatal: malformed input raises a structured error that the
service turns into an ``error`` message, it never drops the connection.
"""

from __future__ import annotations

import json

from .errors import ParseError, ValidationError
from .model import EVENT_KINDS

CLIENT_TYPES = (
    "hello",
    "pair",
    "action",
    "advance_hint",
    "draft_submit",
    "publish_board",
    "reveal",
)
SERVER_TYPES = (
    "welcome",
    "paired",
    "ack",
    "feed",
    "log_tail",
    "engagement",
    "profile",
    "queue",
    "room_profiles",
    "graph",
    "hint",
    "draft_ack",
    "board",
    "reveal",
    "error",
)
ROLES = ("student", "analytics", "teacher")

ACTION_FIELDS = (
    "kind",
    "image",
    "dwell_ms",
    "emoji_code",
    "comment_len",
    "share_scope",
    "followee",
    "gap_ms",
)


def serialize(message: dict) -> str:
    """Canonical one-line JSON encoding of a message."""
    return json.dumps(message, sort_keys=True, separators=(",", ":"))


def parse(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("message must be a JSON object")
    if "type" not in doc:
        raise ParseError("message missing 'type'")
    return doc


def validate_client(doc: dict) -> dict:
    """Check a client message's shape; returns the message unchanged."""
    mtype = doc.get("type")
    if mtype not in CLIENT_TYPES:
        raise ParseError(f"unknown client message type {mtype!r}")
    if mtype == "hello":
        if not isinstance(doc.get("room"), str):
            raise ValidationError("room", "hello requires a room code string")
        if doc.get("role") not in ROLES:
            raise ValidationError("role", f"must be one of {ROLES}")
        if doc["role"] == "student" and not doc.get("nickname"):
            raise ValidationError("nickname", "students must supply a nickname")
    elif mtype == "pair":
        if not isinstance(doc.get("code"), str):
            raise ValidationError("code", "pair requires a code string")
    elif mtype == "action":
        action = doc.get("action")
        if not isinstance(action, dict):
            raise ValidationError("action", "must be an object")
        if action.get("kind") not in EVENT_KINDS:
            raise ValidationError("kind", f"must be one of {EVENT_KINDS}")
        unknown = set(action) - set(ACTION_FIELDS)
        if unknown:
            raise ValidationError(sorted(unknown)[0], "unknown action field")
        nonce = doc.get("nonce")
        if nonce is not None and not isinstance(nonce, str):
            raise ValidationError("nonce", "must be a string when present")
    elif mtype == "draft_submit":
        draft = doc.get("draft")
        if not isinstance(draft, dict):
            raise ValidationError("draft", "must be an object")
        if not isinstance(draft.get("fields"), dict):
            raise ValidationError("fields", "draft requires a fields object")
    return doc


def error_message(code: str, message: str) -> dict:
    return {"type": "error", "code": code, "message": message}
