"""Record the protocol golden transcript fixture.

Drives a seeded hub with a fake clock through a join / pair / action / tick
exchange and freezes every message (client inbound and server outbound) to
tests/fixtures/protocol_golden.json.  The run is fully deterministic, so the
test suite can replay the inputs and compare streams byte for byte.
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from feedlab.model import Manifest
from feedlab.service import Connection, Hub, RoomConfig
from feedlab.simulate import FakeClock

REPO = Path(__file__).resolve().parent.parent
OUT = REPO / "tests" / "fixtures" / "protocol_golden.json"


def main() -> None:
    manifest = Manifest.load(REPO / "fixtures" / "manifest_sample.json")
    clock = FakeClock()
    with tempfile.TemporaryDirectory() as tmp:
        hub = Hub(data_dir=tmp, clock=clock, rng_seed=424242)
        room = hub.create_room(RoomConfig(manifest=manifest), code="GOLD00")

        student = Connection()
        analytics = Connection()
        teacher = Connection()

        steps: list[dict] = []

        def record(name: str, conn_name: str, conn: Connection, message: dict):
            before = len(conn.outbox)
            hub.handle(conn, message)
            steps.append(
                {
                    "step": name,
                    "connection": conn_name,
                    "client": message,
                    "server": conn.outbox[before:],
                }
            )

        record(
            "join_student",
            "student",
            student,
            {"type": "hello", "room": room, "role": "student", "nickname": "fox"},
        )
        record(
            "join_teacher", "teacher", teacher, {"type": "hello", "room": room, "role": "teacher"}
        )
        record(
            "join_analytics",
            "analytics",
            analytics,
            {"type": "hello", "room": room, "role": "analytics"},
        )
        pairing_code = student.outbox[0]["pairing_code"]
        record("pair", "analytics", analytics, {"type": "pair", "code": pairing_code})
        record(
            "action_like",
            "student",
            student,
            {
                "type": "action",
                "nonce": "golden-1",
                "action": {"kind": "like", "image": "img001"},
            },
        )
        record(
            "action_dwell",
            "student",
            student,
            {
                "type": "action",
                "nonce": "golden-2",
                "action": {"kind": "view_dwell", "image": "img003", "dwell_ms": 2500},
            },
        )
        record(
            "action_malformed_kind",
            "student",
            student,
            {"type": "action", "action": {"kind": "teleport", "image": "img001"}},
        )

        clock.advance(200)
        before = {name: len(c.outbox) for name, c in
                  (("student", student), ("analytics", analytics), ("teacher", teacher))}
        hub.maybe_tick(room)
        steps.append(
            {
                "step": "tick",
                "connection": None,
                "client": None,
                "server_by_connection": {
                    "student": student.outbox[before["student"]:],
                    "analytics": analytics.outbox[before["analytics"]:],
                    "teacher": teacher.outbox[before["teacher"]:],
                },
            }
        )
        hub.close()

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        json.dump({"room": "GOLD00", "steps": steps}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {OUT} ({len(steps)} steps)")


if __name__ == "__main__":
    main()
