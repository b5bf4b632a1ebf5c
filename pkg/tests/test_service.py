import json
import threading

import pytest

from feedlab.errors import (
    ConfigurationError,
    DuplicateTeacherError,
    ModeError,
    PairingError,
    ParseError,
    RoleError,
    SequenceError,
    UnknownReferenceError,
    UnknownRoomError,
)
from feedlab.gamekit import GameScript
from feedlab.model import ImageItem, Manifest
from feedlab.recsys import RecConfig
from feedlab.service import (
    PAIRING_TTL_MS,
    Connection,
    Hub,
    RoomConfig,
    canonical_json,
    read_log,
    replay,
    snapshot_bytes,
)
from feedlab import protocol

from .conftest import FIXTURES


class TestCreateRoom:
    def test_creates_code_and_empty_log(self, hub, manifest):
        code = hub.create_room(RoomConfig(manifest=manifest))
        assert len(code) == 6 and code.isalnum() and code.upper() == code
        room = hub.room(code)
        assert room.log == []
        assert room.log_path.exists()

    def test_manifest_smaller_than_queue_is_config_error(self):
        tiny = Manifest(
            images=tuple(
                ImageItem(id=f"i{k}", source_path="p", topics=("t",), author="a")
                for k in range(3)
            )
        )
        with pytest.raises(ConfigurationError):
            RoomConfig(manifest=tiny, rec=RecConfig(queue_len=5))

    def test_two_rooms_get_distinct_codes(self, hub, manifest):
        a = hub.create_room(RoomConfig(manifest=manifest))
        b = hub.create_room(RoomConfig(manifest=manifest))
        assert a != b

    def test_unknown_room_lookup(self, hub):
        with pytest.raises(UnknownRoomError):
            hub.room("NOPE00")


class TestJoin:
    def test_student_gets_user_and_pairing_code(self, hub, feed_room):
        session = hub.join(feed_room, "student", "fox")
        assert session.user == "fox"
        assert session.role == "student"
        assert len(session.pairing_code) == 6

    def test_nickname_dedup_suffix(self, hub, feed_room):
        assert hub.join(feed_room, "student", "fox").user == "fox"
        assert hub.join(feed_room, "student", "fox").user == "fox-2"
        assert hub.join(feed_room, "student", "fox").user == "fox-3"

    def test_second_teacher_rejected(self, hub, feed_room):
        hub.join(feed_room, "teacher")
        with pytest.raises(DuplicateTeacherError):
            hub.join(feed_room, "teacher")


class TestPair:
    def test_fresh_code_pairs(self, hub, feed_room):
        student = hub.join(feed_room, "student", "fox")
        analytics = hub.join(feed_room, "analytics")
        paired = hub.pair(feed_room, analytics.session_id, student.pairing_code)
        assert paired.paired_with == student.session_id

    def test_code_single_use(self, hub, feed_room):
        student = hub.join(feed_room, "student", "fox")
        a1 = hub.join(feed_room, "analytics")
        a2 = hub.join(feed_room, "analytics")
        hub.pair(feed_room, a1.session_id, student.pairing_code)
        with pytest.raises(PairingError, match="used"):
            hub.pair(feed_room, a2.session_id, student.pairing_code)

    def test_code_expires_after_ten_minutes(self, hub, feed_room, clock):
        student = hub.join(feed_room, "student", "fox")
        analytics = hub.join(feed_room, "analytics")
        clock.advance(PAIRING_TTL_MS + 1)
        with pytest.raises(PairingError, match="expired"):
            hub.pair(feed_room, analytics.session_id, student.pairing_code)

    def test_unknown_code(self, hub, feed_room):
        analytics = hub.join(feed_room, "analytics")
        with pytest.raises(PairingError, match="unknown"):
            hub.pair(feed_room, analytics.session_id, "000000")

    def test_student_cannot_pair(self, hub, feed_room):
        student = hub.join(feed_room, "student", "fox")
        with pytest.raises(RoleError):
            hub.pair(feed_room, student.session_id, student.pairing_code)


class TestIngest:
    def test_assigns_dense_seq_and_server_time(self, hub, feed_room, clock):
        student = hub.join(feed_room, "student", "fox")
        ev = hub.ingest(feed_room, student.session_id, {"kind": "like", "image": "img001"})
        assert ev.seq == 1
        assert ev.ts_server == clock()
        ev2 = hub.ingest(feed_room, student.session_id, {"kind": "like", "image": "img002"})
        assert ev2.seq == 2

    def test_unknown_image_rejected(self, hub, feed_room):
        student = hub.join(feed_room, "student", "fox")
        with pytest.raises(UnknownReferenceError):
            hub.ingest(feed_room, student.session_id, {"kind": "like", "image": "ghost"})

    def test_non_student_rejected(self, hub, feed_room):
        teacher = hub.join(feed_room, "teacher")
        with pytest.raises(RoleError):
            hub.ingest(feed_room, teacher.session_id, {"kind": "like", "image": "img001"})

    def test_game_mode_rejects_actions(self, hub, manifest):
        script = GameScript.load(FIXTURES / "game_script_sample.json")
        code = hub.create_room(RoomConfig(manifest=manifest, mode="game", script=script))
        student = hub.join(code, "student", "fox")
        with pytest.raises(ModeError):
            hub.ingest(code, student.session_id, {"kind": "like", "image": "img001"})

    def test_durable_before_ack(self, hub, feed_room):
        student = hub.join(feed_room, "student", "fox")
        ev = hub.ingest(feed_room, student.session_id, {"kind": "like", "image": "img001"})
        on_disk = hub.room(feed_room).log_path.read_text().splitlines()
        assert json.loads(on_disk[-1]) == ev.to_dict()

    def test_thousand_interleaved_actions_dense_and_replayable(
        self, hub, manifest, tmp_path
    ):
        code = hub.create_room(RoomConfig(manifest=manifest))
        sessions = [hub.join(code, "student", f"s{i:02d}") for i in range(30)]
        images = sorted(manifest.ids)

        def worker(session, k):
            for i in range(k):
                hub.ingest(
                    code,
                    session.session_id,
                    {"kind": "like", "image": images[i % len(images)]},
                )

        threads = [
            threading.Thread(target=worker, args=(s, 34 if i < 10 else 33))
            for i, s in enumerate(sessions)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        room = hub.room(code)
        assert [ev.seq for ev in room.log] == list(range(1, 1001))

        live = snapshot_bytes(hub.final_snapshot(code))
        again = snapshot_bytes(replay(room.log_path, room.config))
        assert live == again


def open_conn(hub, room, role, nickname=None):
    conn = Connection()
    hello = {"type": "hello", "room": room, "role": role}
    if nickname:
        hello["nickname"] = nickname
    hub.handle(conn, hello)
    return conn


class TestBroadcastTick:
    def test_single_like_reaches_student_and_paired_device(
        self, hub, feed_room, clock
    ):
        student = open_conn(hub, feed_room, "student", "fox")
        welcome = student.outbox[0]
        analytics = open_conn(hub, feed_room, "analytics")
        hub.handle(analytics, {"type": "pair", "code": welcome["pairing_code"]})
        assert analytics.outbox[-1]["type"] == "paired"

        hub.handle(
            student,
            {"type": "action", "action": {"kind": "like", "image": "img001"}},
        )
        assert student.outbox[-1] == {"type": "ack", "seq": 1}

        clock.advance(200)
        emitted = hub.maybe_tick(feed_room)
        assert emitted

        for conn in (student, analytics):
            types = [m["type"] for m in conn.outbox]
            for expected in ("log_tail", "profile", "queue", "feed"):
                assert expected in types
            tail = next(m for m in conn.outbox if m["type"] == "log_tail")
            assert [e["seq"] for e in tail["events"]] == [1]
            queue = next(m for m in conn.outbox if m["type"] == "queue")
            assert len(queue["slots"]) == 5
            profile = next(m for m in conn.outbox if m["type"] == "profile")
            assert profile["affinities"] == {"cats": 1.0}

    def test_no_events_no_messages(self, hub, feed_room, clock):
        open_conn(hub, feed_room, "student", "fox")
        clock.advance(200)
        assert hub.maybe_tick(feed_room) == []

    def test_throttled_within_100ms(self, hub, feed_room, clock):
        student = open_conn(hub, feed_room, "student", "fox")
        hub.handle(
            student,
            {"type": "action", "action": {"kind": "like", "image": "img001"}},
        )
        clock.advance(200)
        assert hub.maybe_tick(feed_room)
        hub.handle(
            student,
            {"type": "action", "action": {"kind": "like", "image": "img002"}},
        )
        clock.advance(50)
        assert hub.maybe_tick(feed_room) == []
        clock.advance(60)
        assert hub.maybe_tick(feed_room)

    def test_teacher_gets_room_wide_views(self, hub, feed_room, clock):
        teacher = open_conn(hub, feed_room, "teacher")
        student = open_conn(hub, feed_room, "student", "fox")
        hub.handle(
            student,
            {"type": "action", "action": {"kind": "like", "image": "img001"}},
        )
        clock.advance(200)
        hub.maybe_tick(feed_room)
        types = [m["type"] for m in teacher.outbox]
        assert "room_profiles" in types
        kinds = {m["kind"] for m in teacher.outbox if m["type"] == "graph"}
        assert kinds == {"similarity", "coengagement"}
        sim = next(m for m in teacher.outbox if m.get("kind") == "similarity")
        assert "clusters" in sim

    def test_isolation_students_never_see_other_logs(self, hub, feed_room, clock):
        fox = open_conn(hub, feed_room, "student", "fox")
        owl = open_conn(hub, feed_room, "student", "owl")
        for conn, image in ((fox, "img001"), (owl, "img002")):
            hub.handle(
                conn, {"type": "action", "action": {"kind": "like", "image": image}}
            )
        clock.advance(200)
        hub.maybe_tick(feed_room)
        own_images = {"fox": "img001", "owl": "img002"}
        for conn, user in ((fox, "fox"), (owl, "owl")):
            for msg in conn.outbox:
                assert msg["type"] != "room_profiles"
                if msg["type"] == "log_tail":
                    assert {e["user"] for e in msg["events"]} <= {user}
                if msg["type"] == "profile":
                    assert msg["user"] == user
                if msg["type"] == "engagement":
                    assert msg["user"] == user
                    assert [c["image"] for c in msg["cells"]] == [own_images[user]]

    def test_identical_logs_give_identical_payloads(self, manifest, tmp_path):
        def run(where):
            from feedlab.simulate import FakeClock

            clock = FakeClock()
            hub = Hub(data_dir=tmp_path / where, clock=clock, rng_seed=5)
            code = hub.create_room(RoomConfig(manifest=manifest), code="TWIN00")
            student = open_conn(hub, code, "student", "fox")
            for image in ("img001", "img002", "img003"):
                hub.handle(
                    student,
                    {"type": "action", "action": {"kind": "like", "image": image}},
                )
            clock.advance(200)
            emitted = hub.maybe_tick(code)
            hub.close()
            return [
                canonical_json(m) for _, m in emitted
            ], snapshot_bytes(  # noqa: E501
                replay(hub.room(code).log_path, hub.room(code).config)
            )

        first_msgs, first_snap = run("a")
        second_msgs, second_snap = run("b")
        assert first_msgs == second_msgs
        assert first_snap == second_snap


class TestReplay:
    def test_empty_log_empty_snapshot(self, hub, feed_room):
        room = hub.room(feed_room)
        doc = replay(room.log_path, room.config)
        assert doc["seq"] == 0
        assert doc["engagement"] == []
        assert doc["profiles"] == {}

    def test_live_equals_replay(self, hub, feed_room):
        student = hub.join(feed_room, "student", "fox")
        for image in ("img001", "img003", "img001"):
            hub.ingest(feed_room, student.session_id, {"kind": "like", "image": image})
        room = hub.room(feed_room)
        live = snapshot_bytes(hub.final_snapshot(feed_room))
        assert live == snapshot_bytes(replay(room.log_path, room.config))

    def test_seq_gap_names_missing_seq(self, hub, feed_room, tmp_path):
        student = hub.join(feed_room, "student", "fox")
        for image in ("img001", "img002", "img003"):
            hub.ingest(feed_room, student.session_id, {"kind": "like", "image": image})
        room = hub.room(feed_room)
        lines = room.log_path.read_text().splitlines()
        gapped = tmp_path / "gap.log"
        gapped.write_text("\n".join([lines[0], lines[1], lines[3]]) + "\n")
        with pytest.raises(SequenceError, match="missing seq 2"):
            replay(gapped, room.config)

    def test_corrupt_line_reports_line_number(self, hub, feed_room, tmp_path):
        room = hub.room(feed_room)
        bad = tmp_path / "bad.log"
        bad.write_text(room.log_path.read_text() + "{oops\n")
        with pytest.raises(ParseError, match="line 2"):
            read_log(bad)

    def test_header_checked(self, tmp_path, manifest):
        bogus = tmp_path / "x.log"
        bogus.write_text('{"format":"other"}\n')
        with pytest.raises(ParseError, match="line 1"):
            read_log(bogus)


class TestProtocolDispatch:
    def test_malformed_json_yields_error_message(self, hub, feed_room):
        conn = open_conn(hub, feed_room, "student", "fox")
        hub.handle(conn, "{this is not json")
        assert conn.outbox[-1]["type"] == "error"
        assert conn.outbox[-1]["code"] == "parse"

    def test_unknown_type_yields_error(self, hub, feed_room):
        conn = open_conn(hub, feed_room, "student", "fox")
        hub.handle(conn, {"type": "dance"})
        assert conn.outbox[-1]["code"] == "parse"

    def test_unknown_room_reported(self, hub):
        conn = Connection()
        hub.handle(conn, {"type": "hello", "room": "ZZZZZ9", "role": "student", "nickname": "x"})
        assert conn.outbox[-1]["code"] == "unknown_room"

    def test_action_before_hello_rejected(self, hub, feed_room):
        conn = Connection()
        hub.handle(conn, {"type": "action", "action": {"kind": "like", "image": "img001"}})
        assert conn.outbox[-1]["code"] == "role"

    def test_invalid_action_field_is_validation_error(self, hub, feed_room):
        conn = open_conn(hub, feed_room, "student", "fox")
        hub.handle(conn, {"type": "action", "action": {"kind": "like", "image": "img001", "volume": 11}})
        assert conn.outbox[-1]["code"] == "validation"

    def test_nonce_dedup_returns_same_ack(self, hub, feed_room):
        conn = open_conn(hub, feed_room, "student", "fox")
        action = {
            "type": "action",
            "nonce": "n-1",
            "action": {"kind": "like", "image": "img001"},
        }
        hub.handle(conn, action)
        first = conn.outbox[-1]
        hub.handle(conn, action)
        second = conn.outbox[-1]
        assert first == second == {"type": "ack", "seq": 1, "nonce": "n-1"}
        assert len(hub.room(feed_room).log) == 1

    def test_transcript_round_trips_through_serializer(self, hub, feed_room, clock):
        student = open_conn(hub, feed_room, "student", "fox")
        welcome = student.outbox[0]
        analytics = open_conn(hub, feed_room, "analytics")
        transcript_in = [
            {"type": "hello", "room": feed_room, "role": "student", "nickname": "fox"},
            {"type": "pair", "code": welcome["pairing_code"]},
            {
                "type": "action",
                "nonce": "t-1",
                "action": {"kind": "view_dwell", "image": "img001", "dwell_ms": 450},
            },
        ]
        for msg in transcript_in:
            assert protocol.parse(protocol.serialize(msg)) == msg

        hub.handle(analytics, transcript_in[1])
        hub.handle(student, transcript_in[2])
        clock.advance(200)
        hub.maybe_tick(feed_room)
        for conn in (student, analytics):
            for msg in conn.outbox:
                assert protocol.parse(protocol.serialize(msg)) == msg
                assert msg["type"] in protocol.SERVER_TYPES
