"""Room lifecycle, device pairing, event ingestion and snapshot broadcasting.

The Hub is transport-agnostic: connections hand it parsed or raw JSON
messages and receive JSON messages back, so tests (and the simulator) can
speak the wire protocol directly while the websocket server just shuttles
the same payloads.

Per room there is a single serialized writer: every ingest takes the room
lock, assigns the next dense seq and the server timestamp, appends to the
on-disk log (flush + fsync) and only then acknowledges.  Snapshots are pure
functions of the log prefix, which is what makes live runs and replays
byte-identical.
"""

from __future__ import annotations

import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from . import engagement, gamekit, profiling, protocol, recsys, socialgraph
from .errors import (
    ConfigurationError,
    DuplicateTeacherError,
    FeedlabError,
    ModeError,
    PairingError,
    ParseError,
    RoleError,
    SequenceError,
    UnknownRoomError,
    ValidationError,
)
from .gamekit import GameScript, GameState
from .model import EventRecord, Manifest, check_room_code
from .recsys import RecConfig, RoomSnapshot
from .engagement import WeightTable

LOG_FORMAT = "feedlab-log"
LOG_VERSION = 1
PAIRING_TTL_MS = 10 * 60 * 1000
TICK_THROTTLE_MS = 100
ROOM_CODE_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
DATA_DIR_ENV = "FEEDLAB_DATA_DIR"


def now_ms() -> int:
    return int(time.time() * 1000)


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class RoomConfig:
    manifest: Manifest
    mode: str = "feed"
    weights: WeightTable = field(default_factory=WeightTable)
    rec: RecConfig = field(default_factory=RecConfig)
    tau: float = socialgraph.DEFAULT_TAU
    theta: float = socialgraph.DEFAULT_THETA
    script: Optional[GameScript] = None

    def __post_init__(self):
        if self.mode not in ("feed", "game"):
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if len(self.manifest) < self.rec.queue_len:
            raise ConfigurationError(
                f"manifest has {len(self.manifest)} images, "
                f"queue_len {self.rec.queue_len} requires at least that many"
            )
        if not 0.0 <= self.tau <= 1.0:
            raise ConfigurationError("tau must lie in [0, 1]")
        if self.theta < 0:
            raise ConfigurationError("theta must be >= 0")
        if self.mode == "game" and self.script is None:
            raise ConfigurationError("game mode requires a script")

    @classmethod
    def from_dict(cls, doc: dict, manifest: Manifest) -> "RoomConfig":
        script = None
        if "script" in doc and doc["script"] is not None:
            script = GameScript.from_dict(doc["script"])
        return cls(
            manifest=manifest,
            mode=doc.get("mode", "feed"),
            weights=WeightTable.from_dict(doc.get("weights", {})),
            rec=RecConfig.from_dict(doc.get("rec", {})),
            tau=doc.get("tau", socialgraph.DEFAULT_TAU),
            theta=doc.get("theta", socialgraph.DEFAULT_THETA),
            script=script,
        )

    @classmethod
    def from_files(cls, manifest_path, config_path=None) -> "RoomConfig":
        manifest = Manifest.load(manifest_path)
        doc = {}
        if config_path is not None:
            with open(config_path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        return cls.from_dict(doc, manifest)


@dataclass
class SessionInfo:
    session_id: str
    role: str
    user: Optional[str] = None
    paired_with: Optional[str] = None
    pairing_code: Optional[str] = None


@dataclass
class _PairingIssue:
    code: str
    student_session: str
    issued_ms: int
    used: bool = False


class Connection:
    """One client attachment; outgoing messages accumulate in ``outbox``.

    A transport (websocket, test harness, simulator) may install ``on_send``
    to forward messages as they are produced.
    """

    def __init__(self, on_send: Optional[Callable[[dict], None]] = None):
        self.session_id: Optional[str] = None
        self.room_code: Optional[str] = None
        self.outbox: list[dict] = []
        self.on_send = on_send

    def send(self, message: dict) -> None:
        self.outbox.append(message)
        if self.on_send is not None:
            self.on_send(message)


class Room:
    def __init__(self, code: str, config: RoomConfig, created_ms: int, log_path: Path):
        self.code = code
        self.config = config
        self.created_ms = created_ms
        self.lock = threading.RLock()
        self.log: list[EventRecord] = []
        self.eng = engagement.initial_state(code, config.manifest.ids)
        self.impressions: dict[str, list[str]] = {}
        self.sessions: dict[str, SessionInfo] = {}
        self.connections: dict[str, Connection] = {}
        self.user_ids: set[str] = set()
        self.teacher_session: Optional[str] = None
        self.pairing_codes: dict[str, _PairingIssue] = {}
        self.seen_nonces: dict[str, dict[str, int]] = {}
        self.game: Optional[GameState] = None
        if config.mode == "game":
            self.game = GameState(script=config.script)
        self.dirty = False
        self.last_tick_ms = 0
        self.last_tick_seq = 0
        self.log_path = log_path
        self._log_fh = None

    # --- log persistence -------------------------------------------------

    def open_log(self) -> None:
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        fresh = not self.log_path.exists()
        self._log_fh = open(self.log_path, "a", encoding="utf-8")
        if fresh:
            header = {
                "format": LOG_FORMAT,
                "version": LOG_VERSION,
                "room": self.code,
            }
            self._log_fh.write(canonical_json(header) + "\n")
            self._flush_log()

    def _flush_log(self) -> None:
        self._log_fh.flush()
        os.fsync(self._log_fh.fileno())

    def append_log(self, ev: EventRecord) -> None:
        self._log_fh.write(ev.to_json_line() + "\n")
        self._flush_log()

    def close(self) -> None:
        if self._log_fh is not None:
            self._log_fh.close()
            self._log_fh = None

    # --- fold ------------------------------------------------------------

    def apply(self, ev: EventRecord) -> None:
        """Advance the in-memory fold; shared by live ingest and replay."""
        self.eng = engagement.apply_event(self.eng, ev, self.config.weights)
        if ev.kind == "view_dwell":
            self.impressions.setdefault(ev.user, []).append(ev.image)
        self.log.append(ev)
        self.dirty = True

    def users_in_log(self) -> list[str]:
        return sorted({ev.user for ev in self.log})

    def snapshot(self) -> RoomSnapshot:
        weights = self.config.weights
        manifest = self.config.manifest
        profiles = {}
        cells: dict[tuple[str, str], float] = {}
        for user in self.users_in_log():
            user_cells = engagement.user_cells(self.eng, user, weights)
            profiles[user] = profiling.compute_profile(user, user_cells, manifest)
            for cell in user_cells:
                cells[(cell.user, cell.image)] = cell.score
        return RoomSnapshot(
            room=self.code,
            seq=self.eng.last_seq,
            manifest=manifest,
            profiles=profiles,
            cells=cells,
            impressions={u: tuple(v) for u, v in sorted(self.impressions.items())},
        )


class Hub:
    """Registry of rooms plus the message dispatch loop."""

    def __init__(
        self,
        data_dir=None,
        clock: Callable[[], int] = now_ms,
        rng_seed: Optional[int] = None,
    ):
        if data_dir is None:
            data_dir = os.environ.get(DATA_DIR_ENV, "./feedlab_data")
        self.data_dir = Path(data_dir)
        self.clock = clock
        self._rng = random.Random(rng_seed)
        self._lock = threading.Lock()
        self.rooms: dict[str, Room] = {}

    # --- room lifecycle ---------------------------------------------------

    def create_room(self, config: RoomConfig, code: Optional[str] = None) -> str:
        with self._lock:
            if code is None:
                while True:
                    code = "".join(self._rng.choices(ROOM_CODE_ALPHABET, k=6))
                    if code not in self.rooms:
                        break
            else:
                check_room_code(code)
                if code in self.rooms:
                    raise ConfigurationError(f"room {code} already exists")
            room = Room(
                code=code,
                config=config,
                created_ms=self.clock(),
                log_path=self.data_dir / f"{code}.log",
            )
            room.open_log()
            self.rooms[code] = room
            return code

    def room(self, code: str) -> Room:
        room = self.rooms.get(code)
        if room is None:
            raise UnknownRoomError(f"no room {code!r}")
        return room

    def close(self) -> None:
        for room in self.rooms.values():
            room.close()

    # --- sessions ---------------------------------------------------------

    def _new_session_id(self) -> str:
        return f"{self._rng.getrandbits(64):016x}"

    def _new_pairing_code(self, room: Room) -> str:
        while True:
            code = f"{self._rng.randrange(1_000_000):06d}"
            if code not in room.pairing_codes:
                return code

    def join(
        self, room_code: str, role: str, nickname: Optional[str] = None
    ) -> SessionInfo:
        room = self.room(room_code)
        if role not in protocol.ROLES:
            raise RoleError(f"unknown role {role!r}")
        with room.lock:
            if role == "teacher" and room.teacher_session is not None:
                raise DuplicateTeacherError("room already has a teacher")
            session = SessionInfo(session_id=self._new_session_id(), role=role)
            if role == "student":
                if not nickname:
                    raise ValidationError("nickname", "students must supply a nickname")
                session.user = self._dedup_user(room, nickname)
                room.user_ids.add(session.user)
                code = self._new_pairing_code(room)
                room.pairing_codes[code] = _PairingIssue(
                    code=code,
                    student_session=session.session_id,
                    issued_ms=self.clock(),
                )
                session.pairing_code = code
            if role == "teacher":
                room.teacher_session = session.session_id
            room.sessions[session.session_id] = session
            return session

    @staticmethod
    def _dedup_user(room: Room, nickname: str) -> str:
        if nickname not in room.user_ids:
            return nickname
        suffix = 2
        while f"{nickname}-{suffix}" in room.user_ids:
            suffix += 1
        return f"{nickname}-{suffix}"

    def pair(self, room_code: str, analytics_session_id: str, code: str) -> SessionInfo:
        room = self.room(room_code)
        with room.lock:
            session = room.sessions.get(analytics_session_id)
            if session is None or session.role != "analytics":
                raise RoleError("pairing requires an analytics session")
            issue = room.pairing_codes.get(code)
            if issue is None:
                raise PairingError("unknown pairing code")
            if issue.used:
                raise PairingError("pairing code already used")
            if self.clock() - issue.issued_ms > PAIRING_TTL_MS:
                raise PairingError("pairing code expired")
            if issue.student_session not in room.sessions:
                raise PairingError("student session no longer present")
            issue.used = True
            session.paired_with = issue.student_session
            return session

    # --- ingestion ----------------------------------------------------------

    def ingest(self, room_code: str, session_id: str, action: dict) -> EventRecord:
        room = self.room(room_code)
        with room.lock:
            session = room.sessions.get(session_id)
            if session is None or session.role != "student":
                raise RoleError("only student sessions may send actions")
            if room.config.mode != "feed":
                raise ModeError("actions are only accepted in feed mode")
            doc = dict(action)
            doc["seq"] = room.eng.last_seq + 1
            doc["room"] = room.code
            doc["user"] = session.user
            doc["ts_server"] = self.clock()
            ev = EventRecord.from_dict(doc)
            room.apply(ev)
            room.append_log(ev)
            return ev

    # --- broadcast ----------------------------------------------------------

    def maybe_tick(self, room_code: str, force: bool = False) -> list[tuple[str, dict]]:
        """Recompute and emit snapshot messages if due; [] when throttled."""
        room = self.room(room_code)
        with room.lock:
            if not room.dirty and not force:
                return []
            now = self.clock()
            if not force and now - room.last_tick_ms < TICK_THROTTLE_MS:
                return []
            emitted = self._broadcast(room)
            room.dirty = False
            room.last_tick_ms = now
            room.last_tick_seq = room.eng.last_seq
            return emitted

    def _broadcast(self, room: Room) -> list[tuple[str, dict]]:
        snap = room.snapshot()
        cfg = room.config
        emitted: list[tuple[str, dict]] = []

        analytics_for: dict[str, list[str]] = {}
        for session in room.sessions.values():
            if session.role == "analytics" and session.paired_with:
                analytics_for.setdefault(session.paired_with, []).append(
                    session.session_id
                )

        # log is dense from seq 1, so the tail since the last tick is a slice
        tails: dict[str, list[dict]] = {}
        for ev in room.log[room.last_tick_seq :]:
            tails.setdefault(ev.user, []).append(ev.to_dict())

        for session_id in sorted(room.sessions):
            session = room.sessions[session_id]
            if session.role != "student":
                continue
            user = session.user
            profile = snap.profiles.get(user)
            if profile is None:
                profile = profiling.compute_profile(user, [], cfg.manifest)
            queue = recsys.next_queue(user, snap, cfg.rec)
            tail = tails.get(user, [])
            own_cells = engagement.user_cells(room.eng, user, cfg.weights)
            batch = [
                {"type": "log_tail", "events": tail},
                {
                    "type": "engagement",
                    "user": user,
                    "cells": [
                        {
                            "image": c.image,
                            "score": c.score,
                            "components": {k: v for k, v in c.components if v > 0},
                        }
                        for c in own_cells
                    ],
                },
                {"type": "profile", **profile.to_dict()},
                {"type": "queue", "slots": [slot.to_dict() for slot in queue]},
                {"type": "feed", "images": [slot.image for slot in queue]},
            ]
            targets = [session_id] + sorted(analytics_for.get(session_id, []))
            for target in targets:
                for message in batch:
                    emitted.append((target, message))

        if room.teacher_session is not None:
            profiles = [snap.profiles[u].to_dict() for u in sorted(snap.profiles)]
            sim_graph = socialgraph.similarity_graph(snap.profiles, cfg.tau)
            table = engagement.engagement_table(room.eng, cfg.weights)
            co_graph = socialgraph.co_engagement(table, cfg.theta)
            teacher_batch = [
                {
                    "type": "room_profiles",
                    "profiles": profiles,
                    "classroom_affinity": socialgraph.classroom_affinity(
                        snap.profiles
                    ),
                },
                {
                    "type": "graph",
                    "kind": "similarity",
                    **sim_graph.to_dict(),
                    "clusters": socialgraph.clusters(sim_graph),
                },
                {"type": "graph", "kind": "coengagement", **co_graph.to_dict()},
            ]
            for message in teacher_batch:
                emitted.append((room.teacher_session, message))

        for target, message in emitted:
            conn = room.connections.get(target)
            if conn is not None:
                conn.send(message)
        return emitted

    # --- snapshot / replay ----------------------------------------------------

    def final_snapshot(self, room_code: str) -> dict:
        room = self.room(room_code)
        with room.lock:
            return snapshot_doc(room)

    # --- protocol dispatch ------------------------------------------------------

    def handle(self, conn: Connection, raw) -> None:
        """Process one client message; replies (or errors) go to ``conn``."""
        try:
            doc = protocol.parse(raw) if isinstance(raw, str) else dict(raw)
            if "type" not in doc:
                raise ParseError("message missing 'type'")
            protocol.validate_client(doc)
            self._dispatch(conn, doc)
        except FeedlabError as exc:
            conn.send(protocol.error_message(exc.code, exc.message))

    def _dispatch(self, conn: Connection, doc: dict) -> None:
        mtype = doc["type"]
        if mtype == "hello":
            self._handle_hello(conn, doc)
            return
        if conn.session_id is None or conn.room_code is None:
            raise RoleError("send hello before other messages")
        room = self.room(conn.room_code)
        session = room.sessions.get(conn.session_id)
        if session is None:
            raise RoleError("unknown session")

        if mtype == "pair":
            updated = self.pair(room.code, session.session_id, doc["code"])
            student = room.sessions[updated.paired_with]
            conn.send(
                {
                    "type": "paired",
                    "session": updated.session_id,
                    "student_user": student.user,
                }
            )
        elif mtype == "action":
            nonce = doc.get("nonce")
            if nonce is not None:
                seen = room.seen_nonces.setdefault(conn.session_id, {})
                if nonce in seen:
                    conn.send({"type": "ack", "seq": seen[nonce], "nonce": nonce})
                    return
            ev = self.ingest(room.code, session.session_id, doc["action"])
            if nonce is not None:
                room.seen_nonces[conn.session_id][nonce] = ev.seq
            ack = {"type": "ack", "seq": ev.seq}
            if nonce is not None:
                ack["nonce"] = nonce
            conn.send(ack)
        elif mtype == "advance_hint":
            self._require_game(room)
            self._require_teacher(room, session)
            with room.lock:
                hint = gamekit.advance_hint(room.game)
                payload = {
                    "type": "hint",
                    "index": room.game.hint_index,
                    **hint.to_dict(),
                }
            self._broadcast_room(room, payload)
        elif mtype == "draft_submit":
            self._require_game(room)
            if session.role != "student":
                raise RoleError("drafts come from student pair devices")
            draft_doc = doc["draft"]
            with room.lock:
                draft = gamekit.submit_draft(
                    room.game,
                    pair_id=session.user,
                    fields=draft_doc["fields"],
                    tags=draft_doc.get("tags", ()),
                )
            conn.send({"type": "draft_ack", "version": draft.version})
        elif mtype == "publish_board":
            self._require_game(room)
            self._require_teacher(room, session)
            with room.lock:
                board = gamekit.publish_board(room.game)
            payload = {
                "type": "board",
                "drafts": [draft.to_dict() for draft in board],
            }
            self._broadcast_room(room, payload)
        elif mtype == "reveal":
            self._require_game(room)
            self._require_teacher(room, session)
            with room.lock:
                solution = gamekit.reveal(room.game)
            self._broadcast_room(room, {"type": "reveal", "solution": solution})
        else:
            raise ParseError(f"unhandled message type {mtype!r}")

    def _handle_hello(self, conn: Connection, doc: dict) -> None:
        session = self.join(doc["room"], doc["role"], doc.get("nickname"))
        room = self.room(doc["room"])
        conn.session_id = session.session_id
        conn.room_code = room.code
        with room.lock:
            room.connections[session.session_id] = conn
        welcome = {
            "type": "welcome",
            "session": session.session_id,
            "role": session.role,
            "user": session.user,
        }
        if session.pairing_code is not None:
            welcome["pairing_code"] = session.pairing_code
        conn.send(welcome)
        if session.role == "student" and room.config.mode == "feed":
            with room.lock:
                snap = room.snapshot()
                queue = recsys.next_queue(session.user, snap, room.config.rec)
            conn.send({"type": "feed", "images": [slot.image for slot in queue]})
        if room.config.mode == "game" and room.game.hint_index > 0:
            hint = room.game.script.hints[room.game.hint_index - 1]
            conn.send(
                {"type": "hint", "index": room.game.hint_index, **hint.to_dict()}
            )

    @staticmethod
    def _require_teacher(room: Room, session: SessionInfo) -> None:
        if session.role != "teacher":
            raise RoleError("teacher role required")

    @staticmethod
    def _require_game(room: Room) -> None:
        if room.config.mode != "game" or room.game is None:
            raise ModeError("room is not in game mode")

    def _broadcast_room(self, room: Room, message: dict) -> None:
        for session_id in sorted(room.connections):
            room.connections[session_id].send(message)


# --- snapshots & replay -----------------------------------------------------


def snapshot_doc(room: Room) -> dict:
    """Canonical full-room snapshot; equal logs yield equal documents."""
    cfg = room.config
    snap = room.snapshot()
    table = engagement.engagement_table(room.eng, cfg.weights)
    sim_graph = socialgraph.similarity_graph(snap.profiles, cfg.tau)
    co_graph = socialgraph.co_engagement(table, cfg.theta)
    queues = {}
    for user in sorted(snap.profiles):
        queue = recsys.next_queue(user, snap, cfg.rec)
        queues[user] = [slot.to_dict() for slot in queue]
    return {
        "room": room.code,
        "seq": room.eng.last_seq,
        "engagement": [
            {
                "user": cell.user,
                "image": cell.image,
                "score": cell.score,
                "components": {k: v for k, v in cell.components if v > 0},
            }
            for cell in table
        ],
        "profiles": {u: snap.profiles[u].to_dict() for u in sorted(snap.profiles)},
        "classroom_affinity": socialgraph.classroom_affinity(snap.profiles),
        "queues": queues,
        "similarity_graph": sim_graph.to_dict(),
        "clusters": socialgraph.clusters(sim_graph),
        "coengagement_graph": co_graph.to_dict(),
    }


def snapshot_bytes(doc: dict) -> bytes:
    return canonical_json(doc).encode("utf-8")


def read_log(path) -> tuple[dict, list[EventRecord]]:
    """Parse a log file; errors carry the offending line number."""
    events: list[EventRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            raise ParseError("line 1: empty log file")
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line 1: invalid header: {exc}") from exc
        if (
            not isinstance(header, dict)
            or header.get("format") != LOG_FORMAT
            or header.get("version") != LOG_VERSION
        ):
            raise ParseError("line 1: not a feedlab-log v1 header")
        expected_seq = 1
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                ev = EventRecord.from_json_line(line)
            except FeedlabError as exc:
                raise ParseError(f"line {lineno}: {exc.message}") from exc
            if ev.seq != expected_seq:
                raise SequenceError(
                    f"line {lineno}: missing seq {expected_seq}, found {ev.seq}"
                )
            expected_seq += 1
            events.append(ev)
    return header, events


def replay(log_path, config: RoomConfig) -> dict:
    """Fold a recorded log into the same final snapshot a live run produces."""
    header, events = read_log(log_path)
    room = Room(
        code=header["room"],
        config=config,
        created_ms=0,
        log_path=Path(os.devnull),
    )
    for ev in events:
        room.apply(ev)
    return snapshot_doc(room)
