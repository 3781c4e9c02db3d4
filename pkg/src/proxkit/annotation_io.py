"""Annotation CSV and metadata sidecar persistence.

The CSV format is the canonical on-disk form of an annotation set:

    coder_id,pass_id,frame_index,track_id,zone,note
    c1,1,0,t1,i,
    c1,1,4,t1,p,"moved closer, note with comma"

UTF-8, LF line endings, records sorted by (coder_id, pass_id,
frame_index, track_id), notes quoted per CSV rules.  The writer is
canonical: ``write(parse(write(s))) == write(s)`` byte for byte.

Session metadata lives in a sidecar ``key = value`` text file::

    session_id = demo
    agent_type = robot
    group_size = 3
    frame_stride = 4
    fps = 25.0
    grid_cm = 150x150
"""

from __future__ import annotations

import csv
import io
import warnings

from .errors import (
    AnnotationFormatError,
    DuplicateKey,
    InvalidSet,
    MissingHeader,
    NonMonotoneStride,
    UnknownZoneCode,
)
from .model import (
    AgentType,
    AnnotationRecord,
    AnnotationSet,
    SessionMeta,
    ValidationReport,
    Zone,
    _check_meta,
    is_token,
    record_sort_key,
    validate_annotation_set,
)

HEADER = ("coder_id", "pass_id", "frame_index", "track_id", "zone", "note")

DEFAULT_FPS = 25.0
DEFAULT_STRIDE = 4
DEFAULT_GRID_CM = (150, 150)


def parse_annotation_file(data: bytes, meta: SessionMeta) -> AnnotationSet:
    """Parse annotation CSV bytes into a validated set.

    Malformed rows raise with the 1-based line number and cause; the
    returned set always passes :func:`validate_annotation_set`.
    """
    meta_errors = _check_meta_strict(meta)
    if meta_errors:
        raise InvalidSet(meta_errors)

    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise AnnotationFormatError(f"not valid UTF-8: {exc}") from None

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingHeader("empty file, expected header row") from None
    if tuple(header) != HEADER:
        raise MissingHeader(f"expected header {','.join(HEADER)!r}, got {','.join(header)!r}", line=1)

    records: list[AnnotationRecord] = []
    seen: set[tuple[str, int, int, str]] = set()
    tracks: set[str] = set()
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != len(HEADER):
            raise AnnotationFormatError(f"expected {len(HEADER)} fields, got {len(row)}", line=line)
        coder_id, pass_str, frame_str, track_id, zone_code, note = row
        if not is_token(coder_id):
            raise AnnotationFormatError(f"coder_id {coder_id!r} is not a token", line=line)
        if not is_token(track_id):
            raise AnnotationFormatError(f"track_id {track_id!r} is not a token", line=line)
        try:
            pass_id = int(pass_str)
            frame_index = int(frame_str)
        except ValueError:
            raise AnnotationFormatError(
                f"pass_id/frame_index must be integers, got {pass_str!r}/{frame_str!r}", line=line
            ) from None
        if pass_id < 1:
            raise AnnotationFormatError(f"pass_id {pass_id} < 1", line=line)
        if frame_index < 0:
            raise AnnotationFormatError(f"frame_index {frame_index} < 0", line=line)
        if frame_index % meta.frame_stride != 0:
            raise NonMonotoneStride(
                f"frame_index {frame_index} is not a multiple of stride {meta.frame_stride}", line=line
            )
        try:
            zone = Zone.from_code(zone_code)
        except UnknownZoneCode:
            raise UnknownZoneCode(f"unknown zone code {zone_code!r}", line=line) from None
        record = AnnotationRecord(coder_id, pass_id, frame_index, track_id, zone, note)
        if record.key in seen:
            raise DuplicateKey(f"duplicate key {record.key}", line=line)
        seen.add(record.key)
        tracks.add(track_id)
        records.append(record)

    if len(tracks) > meta.group_size:
        raise AnnotationFormatError(
            f"{len(tracks)} distinct track_ids exceed group_size {meta.group_size}"
        )
    return AnnotationSet(meta=meta, records=tuple(records))


def write_annotation_file(aset: AnnotationSet) -> bytes:
    """Serialize to canonical CSV bytes; raises InvalidSet on bad data."""
    report = validate_annotation_set(aset)
    if not report.ok:
        raise InvalidSet(report)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for r in sorted(aset.records, key=record_sort_key):
        writer.writerow([r.coder_id, r.pass_id, r.frame_index, r.track_id, r.zone.code, r.note])
    return buf.getvalue().encode("utf-8")


def _check_meta_strict(meta: SessionMeta) -> ValidationReport | None:
    errs = _check_meta(meta)
    return ValidationReport(errors=tuple(errs)) if errs else None


# -- sidecar -----------------------------------------------------------

_SIDECAR_KEYS = ("session_id", "agent_type", "group_size", "frame_stride", "fps", "grid_cm")


def parse_sidecar(text: str) -> SessionMeta:
    """Parse the key-value sidecar; unknown keys are ignored.

    Missing ``fps`` falls back to 25 with a UserWarning, since time-based
    metrics silently depend on it.
    """
    values: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise AnnotationFormatError(f"sidecar line is not 'key = value': {raw!r}", line=n)
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()

    def require(key: str) -> str:
        if key not in values or not values[key]:
            raise AnnotationFormatError(f"sidecar missing required key {key!r}")
        return values[key]

    session_id = require("session_id")
    agent_raw = require("agent_type")
    try:
        agent_type = AgentType(agent_raw)
    except ValueError:
        raise AnnotationFormatError(
            f"sidecar agent_type must be 'robot' or 'virtual', got {agent_raw!r}"
        ) from None
    try:
        group_size = int(require("group_size"))
        frame_stride = int(values.get("frame_stride", str(DEFAULT_STRIDE)))
    except ValueError as exc:
        raise AnnotationFormatError(f"sidecar integer field: {exc}") from None

    if "fps" in values:
        fps = _parse_fps(values["fps"])
    else:
        warnings.warn("sidecar has no fps; defaulting to 25", UserWarning, stacklevel=2)
        fps = DEFAULT_FPS

    grid_raw = values.get("grid_cm", f"{DEFAULT_GRID_CM[0]}x{DEFAULT_GRID_CM[1]}")
    try:
        w_str, _, h_str = grid_raw.partition("x")
        grid = (int(w_str), int(h_str))
    except ValueError:
        raise AnnotationFormatError(f"sidecar grid_cm must look like '150x150', got {grid_raw!r}") from None

    return SessionMeta(
        session_id=session_id,
        agent_type=agent_type,
        group_size=group_size,
        frame_stride=frame_stride,
        frames_per_second=fps,
        grid_size_cm=grid,
    )


def _parse_fps(raw: str) -> float:
    # accepts plain numbers and rationals such as 30000/1001
    try:
        if "/" in raw:
            num, _, den = raw.partition("/")
            return float(num) / float(den)
        return float(raw)
    except (ValueError, ZeroDivisionError):
        raise AnnotationFormatError(f"sidecar fps is not a number: {raw!r}") from None


def write_sidecar(meta: SessionMeta, partial: bool | None = None) -> str:
    """Canonical sidecar text; ``partial`` marks incomplete exports."""
    lines = [
        f"session_id = {meta.session_id}",
        f"agent_type = {meta.agent_type.value}",
        f"group_size = {meta.group_size}",
        f"frame_stride = {meta.frame_stride}",
        f"fps = {meta.frames_per_second!r}",
        f"grid_cm = {meta.grid_size_cm[0]}x{meta.grid_size_cm[1]}",
    ]
    if partial is not None:
        lines.append(f"partial = {'true' if partial else 'false'}")
    return "\n".join(lines) + "\n"


def read_session(csv_path, sidecar_path=None) -> AnnotationSet:
    """Load an annotation CSV plus its sidecar (default: same stem, .meta)."""
    from pathlib import Path

    csv_path = Path(csv_path)
    if sidecar_path is None:
        sidecar_path = csv_path.with_suffix(".meta")
    meta = parse_sidecar(Path(sidecar_path).read_text(encoding="utf-8"))
    return parse_annotation_file(csv_path.read_bytes(), meta)
