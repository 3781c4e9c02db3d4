#!/usr/bin/env python3
"""Regenerate the deterministic label-replay fixture.

Produces tests/data/replay_events.json (session setup plus 120 label
events, 10 of them overwrites) and replay_expected_export.csv (the
last-write-wins export those events must produce).  Both the Python
service test and the browser UI test consume these files, so the two
clients are checked against the same byte-exact baseline.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from proxkit.annotation_io import write_annotation_file
from proxkit.model import AgentType, AnnotationRecord, AnnotationSet, SessionMeta, Zone

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"

N_FRAMES = 40
STRIDE = 4
TRACKS = ("t1", "t2", "t3")
N_INITIAL = 110
N_OVERWRITES = 10
SEED = 187


def main() -> None:
    rng = random.Random(SEED)
    frames = [k * STRIDE for k in range(N_FRAMES)]
    units = [(f, t) for f in frames for t in TRACKS]
    rng.shuffle(units)
    labeled_units = units[:N_INITIAL]

    zones = "ipsx"
    events = [
        {"coder_id": "c1", "pass_id": 1, "frame_index": f, "track_id": t, "zone": rng.choice(zones)}
        for f, t in labeled_units
    ]
    for f, t in rng.sample(labeled_units, N_OVERWRITES):
        old = next(e["zone"] for e in events if e["frame_index"] == f and e["track_id"] == t)
        new = rng.choice([z for z in zones if z != old])
        events.append(
            {"coder_id": "c1", "pass_id": 1, "frame_index": f, "track_id": t, "zone": new}
        )
    assert len(events) == N_INITIAL + N_OVERWRITES

    # last-write-wins reference model
    final: dict[tuple[int, str], str] = {}
    for e in events:
        final[(e["frame_index"], e["track_id"])] = e["zone"]
    meta = SessionMeta(
        session_id="replay", agent_type=AgentType.ROBOT, group_size=len(TRACKS),
        frame_stride=STRIDE, frames_per_second=25.0,
    )
    records = tuple(
        AnnotationRecord("c1", 1, f, t, Zone(z)) for (f, t), z in final.items()
    )
    expected = write_annotation_file(AnnotationSet(meta=meta, records=records))

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    fixture = {
        "session": {
            "session_id": "replay",
            "agent_type": "robot",
            "group_size": len(TRACKS),
            "frame_stride": STRIDE,
            "fps": 25.0,
            "frames": frames,
            "tracks": list(TRACKS),
        },
        "events": events,
    }
    (OUT_DIR / "replay_events.json").write_text(json.dumps(fixture, indent=1) + "\n")
    (OUT_DIR / "replay_expected_export.csv").write_bytes(expected)
    print(f"wrote {OUT_DIR / 'replay_events.json'} ({len(events)} events)")
    print(f"wrote {OUT_DIR / 'replay_expected_export.csv'} ({len(records)} records)")


if __name__ == "__main__":
    main()
