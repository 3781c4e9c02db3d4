"""Survey ingestion: attitude-scale scoring and canvas bonding distances.

The survey CSV carries one participant per row::

    # canvas_mm=300,300
    participant_id,session_id,gas_1,...,gas_N,placements,demographics
    s001-p1,s001,7,2,...,self:150:150;agent:130:140;member-1:80:200,"{""age"": ""30-39""}"

``placements`` is a semicolon-separated list of ``entity:x:y`` triples in
millimeters on the canvas plane; the required comment line on top gives
the canvas dimensions.  ``demographics`` is an opaque JSON object carried
through untouched.

Bonding is read geometrically: the closer a participant places the agent
marker to their own marker, the stronger the reported bond, so distances
are exported raw (in mm) and interpreted downstream.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable

from .errors import (
    BadPlacementCoordinate,
    MissingAgentPlacement,
    MissingSelfPlacement,
    ResponseOutOfRange,
    SurveyFormatError,
)

SELF = "self"
AGENT = "agent"
_ENTITY_RE = re.compile(r"^(self|agent|member-\d+)$")


@dataclass(frozen=True)
class ScaleDefinition:
    """Shape of the attitude scale: item count, response range, reversals."""

    item_count: int
    likert_min: int
    likert_max: int
    reversed_items: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.item_count < 1:
            raise ValueError("item_count must be >= 1")
        if not self.likert_min < self.likert_max:
            raise ValueError("likert_min must be < likert_max")
        bad = [i for i in self.reversed_items if not 1 <= i <= self.item_count]
        if bad:
            raise ValueError(f"reversed_items out of range: {sorted(bad)}")

    def reverse(self, response: int) -> int:
        # involution: applying twice returns the original response
        return self.likert_min + self.likert_max - response


@dataclass(frozen=True)
class CanvasPlacement:
    entity_id: str
    x_mm: float
    y_mm: float
    canvas_width_mm: float
    canvas_height_mm: float


@dataclass(frozen=True)
class SurveyRecord:
    participant_id: str
    session_id: str
    gas_responses: tuple[int, ...]
    placements: tuple[CanvasPlacement, ...]
    demographics: dict = field(default_factory=dict)

    def placement(self, entity_id: str) -> CanvasPlacement | None:
        for p in self.placements:
            if p.entity_id == entity_id:
                return p
        return None


@dataclass(frozen=True)
class BondingMeasure:
    participant_id: str
    session_id: str
    distance_to_agent_mm: float
    distances_to_members_mm: dict[str, float]
    gas_score: float


def parse_scale_definition(text: str) -> ScaleDefinition:
    """Parse a scale definition file::

        items = 20
        min = 1
        max = 9
        reversed = 3,7,12,18
    """
    values: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    try:
        reversed_items = frozenset(
            int(tok) for tok in values.get("reversed", "").split(",") if tok.strip()
        )
        return ScaleDefinition(
            item_count=int(values["items"]),
            likert_min=int(values["min"]),
            likert_max=int(values["max"]),
            reversed_items=reversed_items,
        )
    except (KeyError, ValueError) as exc:
        raise SurveyFormatError(f"bad scale definition: {exc}") from None


def write_scale_definition(scale: ScaleDefinition) -> str:
    lines = [
        f"items = {scale.item_count}",
        f"min = {scale.likert_min}",
        f"max = {scale.likert_max}",
        f"reversed = {','.join(str(i) for i in sorted(scale.reversed_items))}",
    ]
    return "\n".join(lines) + "\n"


def survey_header(scale: ScaleDefinition) -> tuple[str, ...]:
    gas_cols = tuple(f"gas_{i}" for i in range(1, scale.item_count + 1))
    return ("participant_id", "session_id") + gas_cols + ("placements", "demographics")


def parse_survey_file(data: bytes, scale: ScaleDefinition) -> list[SurveyRecord]:
    """Parse survey CSV bytes; every violation names its 1-based data row."""
    text = data.decode("utf-8")
    lines = text.split("\n", 1)
    if not lines[0].startswith("# canvas_mm="):
        raise SurveyFormatError("missing '# canvas_mm=W,H' comment line")
    try:
        w_str, _, h_str = lines[0].removeprefix("# canvas_mm=").strip().partition(",")
        canvas = (float(w_str), float(h_str))
    except ValueError:
        raise SurveyFormatError(f"bad canvas_mm line: {lines[0]!r}") from None
    if canvas[0] <= 0 or canvas[1] <= 0:
        raise SurveyFormatError(f"canvas dimensions must be positive: {canvas}")

    reader = csv.reader(io.StringIO(lines[1] if len(lines) > 1 else ""))
    header = next(reader, None)
    expected = survey_header(scale)
    if header is None or tuple(header) != expected:
        raise SurveyFormatError(f"expected header {','.join(expected)!r}")

    records = []
    for row_num, row in enumerate(reader, start=1):
        if not row:
            continue
        if len(row) != len(expected):
            raise SurveyFormatError(f"expected {len(expected)} fields, got {len(row)}", row=row_num)
        participant_id, session_id = row[0], row[1]
        responses = []
        for i, cell in enumerate(row[2 : 2 + scale.item_count], start=1):
            try:
                value = int(cell)
            except ValueError:
                raise SurveyFormatError(f"gas_{i} is not an integer: {cell!r}", row=row_num) from None
            if not scale.likert_min <= value <= scale.likert_max:
                raise ResponseOutOfRange(
                    f"gas_{i} = {value} outside [{scale.likert_min}, {scale.likert_max}]", row=row_num
                )
            responses.append(value)
        placements = _parse_placements(row[2 + scale.item_count], canvas, row_num)
        demographics = _parse_demographics(row[3 + scale.item_count], row_num)
        records.append(
            SurveyRecord(
                participant_id=participant_id,
                session_id=session_id,
                gas_responses=tuple(responses),
                placements=placements,
                demographics=demographics,
            )
        )
    return records


def _parse_placements(cell: str, canvas: tuple[float, float], row_num: int) -> tuple[CanvasPlacement, ...]:
    placements = []
    seen = set()
    for triple in cell.split(";"):
        triple = triple.strip()
        if not triple:
            continue
        parts = triple.split(":")
        if len(parts) != 3:
            raise BadPlacementCoordinate(f"placement {triple!r} is not entity:x:y", row=row_num)
        entity, x_str, y_str = parts
        if not _ENTITY_RE.match(entity):
            raise BadPlacementCoordinate(
                f"placement entity {entity!r} must be self, agent or member-k", row=row_num
            )
        if entity in seen:
            raise BadPlacementCoordinate(f"duplicate placement for {entity!r}", row=row_num)
        seen.add(entity)
        try:
            x, y = float(x_str), float(y_str)
        except ValueError:
            raise BadPlacementCoordinate(f"non-numeric coordinates in {triple!r}", row=row_num) from None
        if not (0 <= x <= canvas[0]) or not (0 <= y <= canvas[1]):
            raise BadPlacementCoordinate(
                f"placement {triple!r} outside canvas {canvas[0]}x{canvas[1]} mm", row=row_num
            )
        placements.append(CanvasPlacement(entity, x, y, canvas[0], canvas[1]))
    if SELF not in seen:
        raise MissingSelfPlacement("no 'self' placement", row=row_num)
    return tuple(placements)


def _parse_demographics(cell: str, row_num: int) -> dict:
    if not cell.strip():
        return {}
    try:
        parsed = json.loads(cell)
    except json.JSONDecodeError as exc:
        raise SurveyFormatError(f"demographics is not valid JSON: {exc}", row=row_num) from None
    if not isinstance(parsed, dict):
        raise SurveyFormatError("demographics must be a JSON object", row=row_num)
    return parsed


def write_survey_file(records: Iterable[SurveyRecord], scale: ScaleDefinition,
                      canvas_mm: tuple[float, float]) -> bytes:
    buf = io.StringIO()
    buf.write(f"# canvas_mm={_num(canvas_mm[0])},{_num(canvas_mm[1])}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(survey_header(scale))
    for r in records:
        placements = ";".join(
            f"{p.entity_id}:{_num(p.x_mm)}:{_num(p.y_mm)}" for p in r.placements
        )
        demographics = json.dumps(r.demographics, sort_keys=True) if r.demographics else ""
        writer.writerow(
            [r.participant_id, r.session_id, *r.gas_responses, placements, demographics]
        )
    return buf.getvalue().encode("utf-8")


def _num(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def score_gas(record: SurveyRecord, scale: ScaleDefinition) -> float:
    """Mean of the reverse-corrected items; lies within the Likert range."""
    if len(record.gas_responses) != scale.item_count:
        raise SurveyFormatError(
            f"expected {scale.item_count} responses, got {len(record.gas_responses)}"
        )
    corrected = [
        scale.reverse(r) if i in scale.reversed_items else r
        for i, r in enumerate(record.gas_responses, start=1)
    ]
    return sum(corrected) / len(corrected)


def placement_distance(a: CanvasPlacement, b: CanvasPlacement) -> float:
    return math.hypot(a.x_mm - b.x_mm, a.y_mm - b.y_mm)


def canvas_bonding(record: SurveyRecord, scale: ScaleDefinition) -> BondingMeasure:
    """Euclidean mm distances from the self marker, plus the scale score."""
    self_p = record.placement(SELF)
    if self_p is None:
        raise MissingSelfPlacement(f"participant {record.participant_id!r} has no 'self' placement")
    agent_p = record.placement(AGENT)
    if agent_p is None:
        raise MissingAgentPlacement(f"participant {record.participant_id!r} has no 'agent' placement")
    members = {
        p.entity_id: placement_distance(self_p, p)
        for p in record.placements
        if p.entity_id not in (SELF, AGENT)
    }
    return BondingMeasure(
        participant_id=record.participant_id,
        session_id=record.session_id,
        distance_to_agent_mm=placement_distance(self_p, agent_p),
        distances_to_members_mm=members,
        gas_score=score_gas(record, scale),
    )


BONDING_HEADER = ("participant_id", "session_id", "gas_score", "distance_to_agent_mm", "member_distances_mm")


def write_bonding_csv(measures: Iterable[BondingMeasure]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BONDING_HEADER)
    for m in measures:
        members = ";".join(
            f"{k}:{repr(v)}" for k, v in sorted(m.distances_to_members_mm.items())
        )
        writer.writerow(
            [m.participant_id, m.session_id, repr(m.gas_score), repr(m.distance_to_agent_mm), members]
        )
    return buf.getvalue().encode("utf-8")


def read_bonding_csv(data: bytes) -> list[BondingMeasure]:
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    header = next(reader, None)
    if header is None or tuple(header) != BONDING_HEADER:
        raise ValueError(f"bad bonding CSV header: {header}")
    measures = []
    for row in reader:
        if not row:
            continue
        members = {}
        for part in row[4].split(";"):
            if part.strip():
                name, _, dist = part.partition(":")
                members[name] = float(dist)
        measures.append(
            BondingMeasure(
                participant_id=row[0],
                session_id=row[1],
                gas_score=float(row[2]),
                distance_to_agent_mm=float(row[3]),
                distances_to_members_mm=members,
            )
        )
    return measures
