"""Core domain types: zones, session metadata, annotation records and sets.

All types are immutable values; construction never validates beyond what
the Python type system enforces.  ``validate_annotation_set`` reports
every invariant violation as data, and the file parser in
:mod:`proxkit.annotation_io` rejects exactly the inputs that would fail
validation.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import NamedTuple

from .errors import UnknownZoneCode


class Zone(enum.Enum):
    """One coding label per person per sampled frame.

    The three on-grid zones cover the color-coded floor grid; OFF_SCREEN
    covers everything else (out of frame or beyond the grid).
    """

    INTIMATE = "i"
    PERSONAL = "p"
    SOCIAL = "s"
    OFF_SCREEN = "x"

    @property
    def code(self) -> str:
        return self.value

    @property
    def on_grid(self) -> bool:
        return self is not Zone.OFF_SCREEN

    @classmethod
    def from_code(cls, code: str) -> "Zone":
        try:
            return cls(code)
        except ValueError:
            raise UnknownZoneCode(f"unknown zone code {code!r}") from None


#: Canonical zone ordering used for every 4x4 matrix in the toolkit.
ZONE_ORDER: tuple[Zone, ...] = (Zone.INTIMATE, Zone.PERSONAL, Zone.SOCIAL, Zone.OFF_SCREEN)
ZONE_INDEX: dict[Zone, int] = {z: k for k, z in enumerate(ZONE_ORDER)}
ON_GRID_ZONES: tuple[Zone, ...] = (Zone.INTIMATE, Zone.PERSONAL, Zone.SOCIAL)


class AgentType(enum.Enum):
    ROBOT = "robot"
    VIRTUAL = "virtual"


# Tokens identify coders, tracks and sessions inside comma-separated files,
# so they must stay free of separators, quotes and whitespace.
_TOKEN_RE = re.compile(r"^[^\s,\"]+$")


def is_token(value: str) -> bool:
    return bool(value) and _TOKEN_RE.match(value) is not None


@dataclass(frozen=True, slots=True)
class SessionMeta:
    """Per-session recording metadata, persisted in the sidecar file."""

    session_id: str
    agent_type: AgentType
    group_size: int
    frame_stride: int = 4
    frames_per_second: float = 25.0
    grid_size_cm: tuple[int, int] = (150, 150)


class AnnotationRecord(NamedTuple):
    """One zone label: (coder, pass, frame, track) -> zone, optional note."""

    coder_id: str
    pass_id: int
    frame_index: int
    track_id: str
    zone: Zone
    note: str = ""

    @property
    def key(self) -> tuple[str, int, int, str]:
        return (self.coder_id, self.pass_id, self.frame_index, self.track_id)


def record_sort_key(record: AnnotationRecord) -> tuple[str, int, int, str]:
    return record.key


@dataclass(frozen=True)
class AnnotationSet:
    """A session's labels plus metadata; the unit of persistence.

    Records are normalized to canonical (coder, pass, frame, track) order
    at construction, so structural equality matches file round trips.
    """

    meta: SessionMeta
    records: tuple[AnnotationRecord, ...] = ()

    def __post_init__(self):
        ordered = tuple(sorted(self.records, key=record_sort_key))
        object.__setattr__(self, "records", ordered)

    def slice(self, coder_id: str, pass_id: int) -> tuple[AnnotationRecord, ...]:
        return tuple(
            r for r in self.records if r.coder_id == coder_id and r.pass_id == pass_id
        )

    def coder_passes(self) -> tuple[tuple[str, int], ...]:
        """Distinct (coder_id, pass_id) slices, in canonical order."""
        seen: dict[tuple[str, int], None] = {}
        for r in self.records:
            seen.setdefault((r.coder_id, r.pass_id))
        return tuple(seen)

    def track_ids(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for r in self.records:
            seen.setdefault(r.track_id)
        return tuple(sorted(seen))


@dataclass(frozen=True)
class ValidationReport:
    """Invariant violations found in an annotation set.

    ``errors`` empty if and only if the set satisfies every type invariant;
    warnings flag suspicious but legal data.
    """

    errors: tuple[tuple[str, str], ...] = ()
    warnings: tuple[tuple[str, str], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors


def _check_meta(meta: SessionMeta) -> list[tuple[str, str]]:
    errors = []
    if not is_token(meta.session_id):
        errors.append(("meta", f"BadToken: session_id {meta.session_id!r} is not a token"))
    if not isinstance(meta.agent_type, AgentType):
        errors.append(("meta", f"BadAgentType: {meta.agent_type!r}"))
    if meta.group_size < 1:
        errors.append(("meta", f"BadGroupSize: group_size {meta.group_size} < 1"))
    if meta.frame_stride < 1:
        errors.append(("meta", f"BadStride: frame_stride {meta.frame_stride} < 1"))
    if not meta.frames_per_second > 0:
        errors.append(("meta", f"BadFps: fps {meta.frames_per_second} must be > 0"))
    if meta.grid_size_cm[0] < 1 or meta.grid_size_cm[1] < 1:
        errors.append(("meta", f"BadGrid: grid_size_cm {meta.grid_size_cm}"))
    return errors


def validate_annotation_set(aset: AnnotationSet) -> ValidationReport:
    """Report every invariant violation; never raises, never mutates."""
    errors = _check_meta(aset.meta)
    warnings: list[tuple[str, str]] = []
    stride = aset.meta.frame_stride

    seen_keys: set[tuple[str, int, int, str]] = set()
    tracks: set[str] = set()
    for n, r in enumerate(aset.records):
        loc = f"record {n}"
        if not is_token(r.coder_id):
            errors.append((loc, f"BadToken: coder_id {r.coder_id!r} is not a token"))
        if not is_token(r.track_id):
            errors.append((loc, f"BadToken: track_id {r.track_id!r} is not a token"))
        if r.pass_id < 1:
            errors.append((loc, f"BadPass: pass_id {r.pass_id} < 1"))
        if r.frame_index < 0:
            errors.append((loc, f"BadFrame: frame_index {r.frame_index} < 0"))
        elif stride >= 1 and r.frame_index % stride != 0:
            errors.append(
                (loc, f"NonMonotoneStride: frame_index {r.frame_index} is not a multiple of stride {stride}")
            )
        if not isinstance(r.zone, Zone):
            errors.append((loc, f"UnknownZoneCode: {r.zone!r}"))
        if r.key in seen_keys:
            errors.append((loc, f"DuplicateKey: {r.key}"))
        seen_keys.add(r.key)
        tracks.add(r.track_id)

    if len(tracks) > aset.meta.group_size:
        errors.append(
            ("set", f"TooManyTracks: {len(tracks)} distinct track_ids exceed group_size {aset.meta.group_size}")
        )
    if not aset.records:
        warnings.append(("set", "EmptySet: no records"))
    elif len(tracks) < aset.meta.group_size:
        warnings.append(
            ("set", f"MissingTracks: {len(tracks)} distinct track_ids for group_size {aset.meta.group_size}")
        )
    return ValidationReport(errors=tuple(errors), warnings=tuple(warnings))
