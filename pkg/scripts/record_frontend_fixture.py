"""Record the fixed tick-batch fixture the frontend tests render.

Plays a short deterministic classroom and freezes one broadcast batch
(student view, paired analytics view, teacher view) plus the welcome
messages to frontend/fixtures/snapshot.json.
"""

from __future__ import annotations

import json
import random
import tempfile
from pathlib import Path

from feedlab.model import Manifest
from feedlab.service import Connection, Hub, RoomConfig
from feedlab.simulate import FakeClock

REPO = Path(__file__).resolve().parent.parent
OUT = REPO / "frontend" / "fixtures" / "snapshot.json"


def main() -> None:
    manifest = Manifest.load(REPO / "fixtures" / "manifest_sample.json")
    clock = FakeClock()
    rng = random.Random(99)
    with tempfile.TemporaryDirectory() as tmp:
        hub = Hub(data_dir=tmp, clock=clock, rng_seed=99)
        room = hub.create_room(RoomConfig(manifest=manifest), code="FIXT99")

        teacher = Connection()
        hub.handle(teacher, {"type": "hello", "room": room, "role": "teacher"})

        students = []
        for name in ("fox", "owl", "elk", "ant"):
            conn = Connection()
            hub.handle(
                conn, {"type": "hello", "room": room, "role": "student", "nickname": name}
            )
            students.append(conn)

        analytics = Connection()
        hub.handle(analytics, {"type": "hello", "room": room, "role": "analytics"})
        hub.handle(
            analytics, {"type": "pair", "code": students[0].outbox[0]["pairing_code"]}
        )

        images = sorted(manifest.ids)
        for step in range(25):
            for conn in students:
                image = rng.choice(images)
                roll = rng.random()
                if roll < 0.5:
                    action = {"kind": "view_dwell", "image": image,
                              "dwell_ms": rng.randrange(300, 9_000)}
                elif roll < 0.75:
                    action = {"kind": "like", "image": image}
                elif roll < 0.87:
                    action = {"kind": "emoji", "image": image, "emoji_code": "heart"}
                else:
                    action = {"kind": "comment", "image": image,
                              "comment_len": rng.randrange(2, 90)}
                hub.handle(conn, {"type": "action", "action": action})
                clock.advance(rng.randrange(20, 60))

        clock.advance(250)
        marks = {
            "student": len(students[0].outbox),
            "analytics": len(analytics.outbox),
            "teacher": len(teacher.outbox),
        }
        hub.maybe_tick(room)
        fixture = {
            "room": room,
            "student_user": "fox",
            "welcome": {
                "student": students[0].outbox[0],
                "analytics": analytics.outbox[0],
                "teacher": teacher.outbox[0],
            },
            "tick": {
                "student": students[0].outbox[marks["student"]:],
                "analytics": analytics.outbox[marks["analytics"]:],
                "teacher": teacher.outbox[marks["teacher"]:],
            },
        }
        hub.close()

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        json.dump(fixture, fh, indent=2, sort_keys=True)
        fh.write("\n")
    queue = next(m for m in fixture["tick"]["student"] if m["type"] == "queue")
    profile = next(m for m in fixture["tick"]["student"] if m["type"] == "profile")
    print(f"wrote {OUT}")
    print(f"queue slots: {len(queue['slots'])}, topics: {len(profile['affinities'])}")


if __name__ == "__main__":
    main()
