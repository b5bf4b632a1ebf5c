"""Seeded classroom simulation driving the service through the wire protocol.

Simulated students join a room, browse their served feed and emit random
(but reproducible) actions; a teacher session receives the projector
messages.  The simulator injects a fake millisecond clock, so a given seed
reproduces the identical log file, snapshots and broadcast batches.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .model import SHARE_SCOPES
from .service import Connection, Hub, RoomConfig

SIM_EPOCH_MS = 1_700_000_000_000

EMOJIS = ("heart", "laugh", "wow", "fire")

# action mix: browsing dominates, social actions are rarer
ACTION_WEIGHTS = (
    ("view_dwell", 45),
    ("like", 20),
    ("emoji", 10),
    ("comment", 8),
    ("share", 7),
    ("follow", 4),
    ("unlike", 3),
    ("inactivity", 3),
)


@dataclass
class SimResult:
    room_code: str
    hub: Hub
    students: list[Connection]
    teacher: Connection
    users: list[str]
    log_path: str
    snapshot: dict
    emitted: list[tuple[str, dict]] = field(default_factory=list)


class FakeClock:
    def __init__(self, start_ms: int = SIM_EPOCH_MS):
        self.now = start_ms

    def __call__(self) -> int:
        return self.now

    def advance(self, ms: int) -> None:
        self.now += ms


def _pick_action(rng: random.Random, kinds, weights) -> str:
    return rng.choices(kinds, weights=weights, k=1)[0]


def run_classroom(
    config: RoomConfig,
    data_dir,
    students: int = 30,
    steps: int = 500,
    seed: int = 0,
    room_code: str | None = None,
    tick_every: int = 10,
) -> SimResult:
    """Run one simulated classroom session; returns the final snapshot.

    ``steps`` counts rounds; in each round every student performs exactly
    one action.  Ticks run every ``tick_every`` rounds and once at the end.
    """
    rng = random.Random(seed)
    clock = FakeClock()
    hub = Hub(data_dir=data_dir, clock=clock, rng_seed=seed)
    code = hub.create_room(config, code=room_code)

    teacher = Connection()
    hub.handle(teacher, {"type": "hello", "room": code, "role": "teacher"})

    conns: list[Connection] = []
    users: list[str] = []
    feeds: dict[int, list[str]] = {}
    for i in range(students):
        conn = Connection()
        index = i

        def remember_feed(msg, index=index):
            if msg.get("type") == "feed":
                feeds[index] = list(msg["images"])

        conn.on_send = remember_feed
        hub.handle(
            conn,
            {"type": "hello", "room": code, "role": "student", "nickname": f"sim{i:02d}"},
        )
        welcome = conn.outbox[0]
        users.append(welcome["user"])
        conns.append(conn)

    manifest_ids = sorted(config.manifest.ids)
    kinds = [k for k, _ in ACTION_WEIGHTS]
    weights = [w for _, w in ACTION_WEIGHTS]

    emitted: list[tuple[str, dict]] = []
    for step in range(steps):
        for i, conn in enumerate(conns):
            kind = _pick_action(rng, kinds, weights)
            feed = feeds.get(i) or manifest_ids
            image = rng.choice(feed) if rng.random() < 0.9 else rng.choice(manifest_ids)
            action: dict = {"kind": kind}
            if kind == "view_dwell":
                action.update(image=image, dwell_ms=rng.randrange(200, 12_000))
            elif kind in ("like", "unlike"):
                action.update(image=image)
            elif kind == "emoji":
                action.update(image=image, emoji_code=rng.choice(EMOJIS))
            elif kind == "comment":
                action.update(image=image, comment_len=rng.randrange(1, 120))
            elif kind == "share":
                action.update(image=image, share_scope=rng.choice(SHARE_SCOPES))
            elif kind == "follow":
                followee = rng.choice(users)
                action.update(followee=followee)
                if rng.random() < 0.5:
                    action["image"] = image
            elif kind == "inactivity":
                action.update(gap_ms=rng.randrange(1_000, 60_000))
            hub.handle(conn, {"type": "action", "action": action})
            clock.advance(rng.randrange(5, 40))
        if (step + 1) % tick_every == 0:
            emitted.extend(hub.maybe_tick(code))

    clock.advance(200)
    emitted.extend(hub.maybe_tick(code))
    snapshot = hub.final_snapshot(code)
    return SimResult(
        room_code=code,
        hub=hub,
        students=conns,
        teacher=teacher,
        users=users,
        log_path=str(hub.room(code).log_path),
        snapshot=snapshot,
        emitted=emitted,
    )
