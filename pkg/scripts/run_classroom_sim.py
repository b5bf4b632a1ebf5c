"""Run a seeded classroom session and print what the projector would show.

Usage:
    python scripts/run_classroom_sim.py [--students 12] [--steps 80] [--seed 7]

Writes the room log and final snapshot under ./feedlab_data/ and prints a
digest: the busiest profiles, the similarity clusters, and one student's
explained queue.
"""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from feedlab.cli import load_room_config  # noqa: E402
from feedlab.service import snapshot_bytes  # noqa: E402
from feedlab.simulate import run_classroom  # noqa: E402


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--students", type=int, default=12)
    parser.add_argument("--steps", type=int, default=80)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--data-dir", default=None)
    args = parser.parse_args()

    config = load_room_config(REPO / "fixtures" / "room_config_sample.json")
    data_dir = args.data_dir or tempfile.mkdtemp(prefix="feedlab_")
    result = run_classroom(
        config,
        data_dir=data_dir,
        students=args.students,
        steps=args.steps,
        seed=args.seed,
    )
    snap = result.snapshot
    print(f"room {result.room_code}: {snap['seq']} events, log at {result.log_path}")

    print("\ntop profiles (affinity word clouds):")
    ranked = sorted(
        snap["profiles"].values(), key=lambda p: -p["total"]
    )[:5]
    for profile in ranked:
        cloud = sorted(profile["affinities"].items(), key=lambda kv: -kv[1])[:4]
        terms = ", ".join(f"{t}:{v:.2f}" for t, v in cloud)
        print(f"  {profile['user']:<8} total={profile['total']:7.1f}  {terms}")

    print("\nsimilarity clusters:")
    for part in snap["clusters"]:
        print("  " + ", ".join(part))

    user = ranked[0]["user"]
    print(f"\nnext-5 queue for {user}:")
    for slot in snap["queues"][user]:
        why_topics = ", ".join(f"{t} ({c:.2f})" for t, c in slot["explain_topics"])
        why_users = ", ".join(u for u, _, _ in slot["explain_users"])
        flag = " [explored]" if slot["explored"] else ""
        print(f"  {slot['image']} score={slot['score']:.3f}{flag}")
        if why_topics:
            print(f"      topics: {why_topics}")
        if why_users:
            print(f"      similar users: {why_users}")

    out = Path(data_dir) / f"{result.room_code}.snapshot.json"
    out.write_bytes(snapshot_bytes(snap))
    print(f"\nsnapshot: {out}")
    result.hub.close()


if __name__ == "__main__":
    main()
