import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # naive_oracles importable as a top-level module

from proxkit.model import AgentType, AnnotationRecord, AnnotationSet, SessionMeta, Zone

ZONES = tuple(Zone)
LETTERS = "ipsx"


def make_meta(session_id="demo", group_size=3, stride=4, fps=25.0, agent=AgentType.ROBOT):
    return SessionMeta(
        session_id=session_id,
        agent_type=agent,
        group_size=group_size,
        frame_stride=stride,
        frames_per_second=fps,
    )


def letters_to_zones(letters):
    return tuple(Zone(c) for c in letters)


def random_annotation_set(rng: random.Random, max_tracks=3, max_frames=30) -> AnnotationSet:
    """Valid random set: 1-2 coders, 1-2 passes, per-track frame runs."""
    stride = rng.choice((1, 2, 4))
    n_tracks = rng.randint(1, max_tracks)
    meta = make_meta(
        session_id=f"s{rng.randint(0, 9999):04d}",
        group_size=n_tracks,
        stride=stride,
        fps=rng.choice((24.0, 25.0, 30.0)),
        agent=rng.choice((AgentType.ROBOT, AgentType.VIRTUAL)),
    )
    records = []
    for coder in [f"c{k}" for k in range(1, rng.randint(1, 2) + 1)]:
        for pass_id in range(1, rng.randint(1, 2) + 1):
            for track in [f"t{k}" for k in range(1, n_tracks + 1)]:
                n_frames = rng.randint(1, max_frames)
                for frame in range(n_frames):
                    note = rng.choice(("", "", "", "paused, looked away", 'said "hi"'))
                    records.append(
                        AnnotationRecord(
                            coder, pass_id, frame * stride, track,
                            rng.choice(ZONES), note,
                        )
                    )
    return AnnotationSet(meta=meta, records=tuple(records))


@pytest.fixture
def meta():
    return make_meta()
