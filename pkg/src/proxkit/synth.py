"""Seeded synthetic study generator with a planted bonding-proximity link.

Each session draws a group size, then per member a latent bonding level
``b`` in [0, 1].  The member's zone sequence comes from a Markov chain
whose transition matrix is a convex blend of a configurable base matrix
with an intimate-absorbing matrix, weighted by ``coupling * b``; the
member's survey places the agent marker at a distance that decreases in
``b``.  Recovering that monotone link end to end is the pipeline's
strongest self-check.

Randomness: every draw reduces to ``random.Random.random()`` (Mersenne
Twister), seeded per session with the first 8 bytes of
SHA-256("<seed>:<session_id>").  Sessions are therefore independent
substreams and can be generated in any order, or in parallel, without
changing a single byte of output.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from random import Random
from typing import Iterator

from .annotation_io import write_annotation_file, write_sidecar
from .errors import InvalidConfig
from .model import ZONE_ORDER, AgentType, AnnotationRecord, AnnotationSet, SessionMeta
from .survey import (
    ScaleDefinition,
    SurveyRecord,
    CanvasPlacement,
    write_scale_definition,
    write_survey_file,
)
from .triangulate import LinkRow, LinkTable, write_link_csv

DEFAULT_GROUP_SIZE_WEIGHTS = {1: 0.45, 2: 0.30, 3: 0.15, 4: 0.10}
DEFAULT_BASE_TRANSITION = tuple(
    tuple(0.85 if i == j else 0.05 for j in range(4)) for i in range(4)
)
# initial state draw: mildly off-screen-heavy so leading-x trimming is exercised
INITIAL_STATE_CUMULATIVE = (0.15, 0.35, 0.65, 1.0)  # i, p, s, x

DEFAULT_SCALE = ScaleDefinition(item_count=20, likert_min=1, likert_max=9,
                                reversed_items=frozenset({3, 7, 12, 18}))
DEFAULT_CANVAS_MM = (300.0, 300.0)

Matrix = tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class GeneratorConfig:
    group_size_weights: dict[int, float] = field(
        default_factory=lambda: dict(DEFAULT_GROUP_SIZE_WEIGHTS)
    )
    session_frames: int = 120
    frame_stride: int = 4
    coupling: float = 1.0
    base_transition: Matrix = DEFAULT_BASE_TRANSITION
    seed: int = 187
    frames_per_second: float = 25.0
    canvas_mm: tuple[float, float] = DEFAULT_CANVAS_MM
    scale: ScaleDefinition = DEFAULT_SCALE


def validate_config(config: GeneratorConfig) -> None:
    weights = config.group_size_weights
    if not weights or any(k not in (1, 2, 3, 4) for k in weights):
        raise InvalidConfig(f"group_size_weights keys must be within 1..4, got {sorted(weights)}")
    if any(w < 0 for w in weights.values()):
        raise InvalidConfig("group_size_weights must be non-negative")
    if abs(sum(weights.values()) - 1.0) > 1e-12:
        raise InvalidConfig(f"group_size_weights must sum to 1, got {sum(weights.values())!r}")
    if config.session_frames < 1:
        raise InvalidConfig("session_frames must be >= 1")
    if config.frame_stride < 1:
        raise InvalidConfig("frame_stride must be >= 1")
    if not 0.0 <= config.coupling <= 1.0:
        raise InvalidConfig(f"coupling must lie in [0, 1], got {config.coupling}")
    if len(config.base_transition) != 4 or any(len(row) != 4 for row in config.base_transition):
        raise InvalidConfig("base_transition must be a 4x4 matrix")
    for i, row in enumerate(config.base_transition):
        if any(p < 0 for p in row):
            raise InvalidConfig(f"base_transition row {i} has a negative entry")
        if abs(sum(row) - 1.0) > 1e-12:
            raise InvalidConfig(f"base_transition row {i} sums to {sum(row)!r}, not 1")
    # agent markers sit on a circle of radius <= 105 mm around self
    if config.canvas_mm[0] < 230 or config.canvas_mm[1] < 230:
        raise InvalidConfig(f"canvas_mm must be at least 230x230, got {config.canvas_mm}")


def blend_transition(base: Matrix, weight: float) -> Matrix:
    """Convex blend of ``base`` with the intimate-absorbing matrix.

    Row-stochasticity is preserved: each output row sums to 1 up to
    floating-point rounding.
    """
    return tuple(
        tuple((1.0 - weight) * p + (weight if j == 0 else 0.0) for j, p in enumerate(row))
        for row in base
    )


@dataclass(frozen=True)
class SyntheticSession:
    annotation: AnnotationSet
    ground_truth_bonding: dict[str, float]
    survey: tuple[SurveyRecord, ...]

    def link_rows(self) -> list[LinkRow]:
        session_id = self.annotation.meta.session_id
        return [
            LinkRow(session_id, record.participant_id, f"t{k}")
            for k, record in enumerate(self.survey, start=1)
        ]


def _session_rng(seed: int, session_id: str) -> Random:
    digest = hashlib.sha256(f"{seed}:{session_id}".encode("utf-8")).digest()
    return Random(int.from_bytes(digest[:8], "big"))


def _draw_cumulative(rng: Random, cumulative: tuple[float, ...]) -> int:
    u = rng.random()
    for idx, bound in enumerate(cumulative):
        if u < bound:
            return idx
    return len(cumulative) - 1


def _zone_indices(rng: Random, blended: Matrix, n_frames: int) -> list[int]:
    cumulative = []
    for row in blended:
        acc, cum = 0.0, []
        for p in row:
            acc += p
            cum.append(acc)
        cum[-1] = 1.0  # guard against rounding at the top end
        cumulative.append(tuple(cum))
    state = _draw_cumulative(rng, INITIAL_STATE_CUMULATIVE)
    states = [state]
    for _ in range(n_frames - 1):
        state = _draw_cumulative(rng, cumulative[state])
        states.append(state)
    return states


def _gas_responses(rng: Random, b: float, scale: ScaleDefinition) -> tuple[int, ...]:
    span = scale.likert_max - scale.likert_min
    responses = []
    for item in range(1, scale.item_count + 1):
        target = scale.likert_min + b * span + (rng.random() * 2.0 - 1.0) * 1.5
        value = min(scale.likert_max, max(scale.likert_min, round(target)))
        if item in scale.reversed_items:
            value = scale.reverse(value)
        responses.append(value)
    return tuple(responses)


def _placements(
    rng: Random, b: float, group_size: int, member_index: int, canvas: tuple[float, float]
) -> tuple[CanvasPlacement, ...]:
    width, height = canvas
    # keep self away from the border so the agent circle always fits
    margin = 105.0
    self_x = margin + 5.0 + rng.random() * (width - 2 * (margin + 5.0))
    self_y = margin + 5.0 + rng.random() * (height - 2 * (margin + 5.0))
    distance = max(0.0, 100.0 * (1.0 - b) + (rng.random() * 2.0 - 1.0) * 5.0)
    angle = rng.random() * 2.0 * math.pi
    agent_x = self_x + distance * math.cos(angle)
    agent_y = self_y + distance * math.sin(angle)
    placements = [
        CanvasPlacement("self", self_x, self_y, width, height),
        CanvasPlacement("agent", agent_x, agent_y, width, height),
    ]
    # one marker per fellow group member, uniformly placed
    k = 0
    for other in range(1, group_size + 1):
        if other == member_index:
            continue
        k += 1
        placements.append(
            CanvasPlacement(f"member-{k}", rng.random() * width, rng.random() * height, width, height)
        )
    return tuple(placements)


_AGE_GROUPS = ("under-18", "18-29", "30-49", "50-plus")


def generate_session(config: GeneratorConfig, session_id: str) -> SyntheticSession:
    """Deterministic for a fixed (config.seed, session_id)."""
    validate_config(config)
    rng = _session_rng(config.seed, session_id)

    sizes = sorted(config.group_size_weights)
    cumulative, acc = [], 0.0
    for size in sizes:
        acc += config.group_size_weights[size]
        cumulative.append(acc)
    cumulative[-1] = 1.0
    group_size = sizes[_draw_cumulative(rng, tuple(cumulative))]
    agent_type = AgentType.ROBOT if rng.random() < 0.5 else AgentType.VIRTUAL

    meta = SessionMeta(
        session_id=session_id,
        agent_type=agent_type,
        group_size=group_size,
        frame_stride=config.frame_stride,
        frames_per_second=config.frames_per_second,
    )

    bonding: dict[str, float] = {}
    survey: list[SurveyRecord] = []
    member_states: list[list[int]] = []
    for member in range(1, group_size + 1):
        track_id = f"t{member}"
        b = rng.random()
        bonding[track_id] = b
        blended = blend_transition(config.base_transition, config.coupling * b)
        member_states.append(_zone_indices(rng, blended, config.session_frames))
        survey.append(
            SurveyRecord(
                participant_id=f"{session_id}-p{member}",
                session_id=session_id,
                gas_responses=_gas_responses(rng, b, config.scale),
                placements=_placements(rng, b, group_size, member, config.canvas_mm),
                demographics={
                    "age_group": _AGE_GROUPS[_draw_cumulative(rng, (0.25, 0.5, 0.75, 1.0))],
                    "prior_agent_experience": "yes" if rng.random() < 0.4 else "no",
                },
            )
        )

    # emit frame-major so records are already in canonical order
    stride = config.frame_stride
    tracks = [f"t{m}" for m in range(1, group_size + 1)]
    records = tuple(
        AnnotationRecord("synth", 1, frame * stride, tracks[m], ZONE_ORDER[member_states[m][frame]])
        for frame in range(config.session_frames)
        for m in range(group_size)
    )
    annotation = AnnotationSet(meta=meta, records=records)
    return SyntheticSession(annotation=annotation, ground_truth_bonding=bonding, survey=tuple(survey))


def session_ids(n_sessions: int) -> list[str]:
    return [f"s{k:04d}" for k in range(1, n_sessions + 1)]


def iter_sessions(config: GeneratorConfig, n_sessions: int) -> Iterator[SyntheticSession]:
    if n_sessions < 1:
        raise InvalidConfig("n_sessions must be >= 1")
    validate_config(config)
    for session_id in session_ids(n_sessions):
        yield generate_session(config, session_id)


def generate_corpus(config: GeneratorConfig, n_sessions: int) -> list[SyntheticSession]:
    """Deterministic per seed; sessions are independent given their ids."""
    return list(iter_sessions(config, n_sessions))


def write_corpus(sessions: list[SyntheticSession], out_dir, config: GeneratorConfig) -> None:
    """Emit a complete study directory: annotation CSVs + sidecars per
    session, one survey CSV, the link table, and the scale definition."""
    out = Path(out_dir)
    (out / "sessions").mkdir(parents=True, exist_ok=True)
    link_rows: list[LinkRow] = []
    survey_records: list[SurveyRecord] = []
    for session in sessions:
        sid = session.annotation.meta.session_id
        (out / "sessions" / f"{sid}.csv").write_bytes(write_annotation_file(session.annotation))
        (out / "sessions" / f"{sid}.meta").write_text(
            write_sidecar(session.annotation.meta), encoding="utf-8"
        )
        survey_records.extend(session.survey)
        link_rows.extend(session.link_rows())
    (out / "survey.csv").write_bytes(
        write_survey_file(survey_records, config.scale, config.canvas_mm)
    )
    (out / "link.csv").write_bytes(write_link_csv(LinkTable(rows=tuple(link_rows))))
    (out / "scale.txt").write_text(write_scale_definition(config.scale), encoding="utf-8")


# -- config file -------------------------------------------------------


def parse_generator_config(text: str) -> GeneratorConfig:
    """Flat ``key = value`` generator settings; omitted keys keep defaults.

    Recognized keys: seed, session_frames, frame_stride, coupling,
    group_size_weights (``1:0.45,2:0.30,...``), base_transition (four
    comma-separated rows joined by ``/``), fps, canvas_mm (``WxH``).
    """
    values: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise InvalidConfig(f"config line is not 'key = value': {raw!r}")
        values[key.strip()] = value.strip()

    kwargs = {}
    try:
        if "seed" in values:
            kwargs["seed"] = int(values["seed"])
        if "session_frames" in values:
            kwargs["session_frames"] = int(values["session_frames"])
        if "frame_stride" in values:
            kwargs["frame_stride"] = int(values["frame_stride"])
        if "coupling" in values:
            kwargs["coupling"] = float(values["coupling"])
        if "fps" in values:
            kwargs["frames_per_second"] = float(values["fps"])
        if "canvas_mm" in values:
            w, _, h = values["canvas_mm"].partition("x")
            kwargs["canvas_mm"] = (float(w), float(h))
        if "group_size_weights" in values:
            weights = {}
            for pair in values["group_size_weights"].split(","):
                size, _, weight = pair.partition(":")
                weights[int(size)] = float(weight)
            kwargs["group_size_weights"] = weights
        if "base_transition" in values:
            rows = []
            for row in values["base_transition"].split("/"):
                rows.append(tuple(float(p) for p in row.split(",")))
            kwargs["base_transition"] = tuple(rows)
    except ValueError as exc:
        raise InvalidConfig(f"bad generator config value: {exc}") from None

    config = GeneratorConfig(**kwargs)
    validate_config(config)
    return config
