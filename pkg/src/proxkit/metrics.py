"""Per-track proximity metrics over coded zone sequences.

The pipeline for one track is: order labels by frame, drop the leading
off-screen run (a camera/default artifact rather than behavior), smooth
single-frame blips with an iterated modal filter, then derive zone time
shares, the predominant zone, transition counts and observed duration.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import AllOffScreen, UnknownCoderPass
from .model import ON_GRID_ZONES, ZONE_INDEX, ZONE_ORDER, AnnotationSet, Zone

DEFAULT_SMOOTHING_WINDOW = 3
DEFAULT_TIE_BREAK: tuple[Zone, Zone, Zone] = ON_GRID_ZONES
_MAX_SMOOTHING_PASSES = 10


@dataclass(frozen=True)
class ZoneSequence:
    """One track's zone labels in frame order, with sampling context."""

    track_id: str
    zones: tuple[Zone, ...]
    frame_stride: int
    frames_per_second: float

    def replaced(self, zones: Iterable[Zone]) -> "ZoneSequence":
        return ZoneSequence(self.track_id, tuple(zones), self.frame_stride, self.frames_per_second)


@dataclass(frozen=True)
class ZoneShares:
    """Time shares per zone.

    On-grid shares (intimate/personal/social) are fractions of the
    on-grid frames and sum to 1; the off-screen fraction is taken over
    all frames and reported separately so absence never distorts the
    on-grid split.
    """

    intimate: float
    personal: float
    social: float
    offscreen_fraction: float
    on_grid_frames: int
    total_frames: int

    def share(self, zone: Zone) -> float:
        return {Zone.INTIMATE: self.intimate, Zone.PERSONAL: self.personal, Zone.SOCIAL: self.social}[zone]


@dataclass(frozen=True)
class TransitionStats:
    """Adjacent-frame transition tallies.

    ``matrix`` is a 4x4 nested tuple of counts in canonical zone order
    (i, p, s, x); ``zone_transition_count`` counts changes between two
    on-grid zones, ``raw_change_count`` counts every change including
    those through off-screen.
    """

    matrix: tuple[tuple[int, int, int, int], ...]
    zone_transition_count: int
    raw_change_count: int

    def as_array(self):
        import numpy as np

        return np.array(self.matrix, dtype=int)


@dataclass(frozen=True)
class ProxemicsMetrics:
    shares: ZoneShares
    predominant: Zone
    transitions: TransitionStats
    observed_seconds: float


@dataclass(frozen=True)
class SessionMetricsResult:
    """Metrics per track plus the tracks skipped as entirely off-screen."""

    per_track: dict[str, ProxemicsMetrics]
    skipped: tuple[tuple[str, str], ...] = ()


def trim_leading_offscreen(seq: ZoneSequence) -> ZoneSequence:
    """Drop the longest all-off-screen prefix; raise if nothing remains."""
    start = 0
    while start < len(seq.zones) and seq.zones[start] is Zone.OFF_SCREEN:
        start += 1
    if start == len(seq.zones):
        raise AllOffScreen(seq.track_id)
    return seq if start == 0 else seq.replaced(seq.zones[start:])


def _modal_pass(zones: tuple[Zone, ...], window: int) -> tuple[Zone, ...]:
    half = window // 2
    out = list(zones)
    for k in range(half, len(zones) - half):
        counts = Counter(zones[k - half : k + half + 1])
        best = counts.most_common()
        top = best[0][1]
        modes = [z for z, c in best if c == top]
        if len(modes) == 1:
            out[k] = modes[0]
        # ties keep the original element
    return tuple(out)


def smooth_blips(seq: ZoneSequence, window: int = DEFAULT_SMOOTHING_WINDOW) -> ZoneSequence:
    """Iterated modal filter, run to fixpoint (at most 10 passes).

    Each interior element becomes the modal value of its centered window;
    ties keep the original value and the first/last ``window // 2``
    elements are never modified, so length is preserved and no new zones
    are invented.  Sequences shorter than the window pass through.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be an odd integer >= 3, got {window}")
    zones = seq.zones
    if len(zones) < window:
        return seq
    for _ in range(_MAX_SMOOTHING_PASSES):
        smoothed = _modal_pass(zones, window)
        if smoothed == zones:
            break
        zones = smoothed
    return seq if zones == seq.zones else seq.replaced(zones)


def time_in_zone(seq: ZoneSequence) -> ZoneShares:
    """Integer-exact zone counts converted to shares."""
    counts = Counter(seq.zones)
    total = len(seq.zones)
    on_grid = total - counts[Zone.OFF_SCREEN]
    if on_grid < 1:
        raise AllOffScreen(seq.track_id)
    return ZoneShares(
        intimate=counts[Zone.INTIMATE] / on_grid,
        personal=counts[Zone.PERSONAL] / on_grid,
        social=counts[Zone.SOCIAL] / on_grid,
        offscreen_fraction=counts[Zone.OFF_SCREEN] / total,
        on_grid_frames=on_grid,
        total_frames=total,
    )


def predominant_zone(
    shares: ZoneShares, tie_break: tuple[Zone, Zone, Zone] = DEFAULT_TIE_BREAK
) -> Zone:
    """On-grid zone with maximal share; ties go to the closest zone."""
    best = max(shares.share(z) for z in ON_GRID_ZONES)
    for zone in tie_break:
        if shares.share(zone) == best:
            return zone
    raise AssertionError("unreachable: tie_break must cover all on-grid zones")


def transition_stats(seq: ZoneSequence) -> TransitionStats:
    matrix = [[0, 0, 0, 0] for _ in ZONE_ORDER]
    zone_transitions = 0
    raw_changes = 0
    for a, b in zip(seq.zones, seq.zones[1:]):
        matrix[ZONE_INDEX[a]][ZONE_INDEX[b]] += 1
        if a is not b:
            raw_changes += 1
            if a.on_grid and b.on_grid:
                zone_transitions += 1
    return TransitionStats(
        matrix=tuple(tuple(row) for row in matrix),
        zone_transition_count=zone_transitions,
        raw_change_count=raw_changes,
    )


def sequence_metrics(
    seq: ZoneSequence,
    smoothing_window: int | None = DEFAULT_SMOOTHING_WINDOW,
    tie_break: tuple[Zone, Zone, Zone] = DEFAULT_TIE_BREAK,
) -> ProxemicsMetrics:
    """Full pipeline for one track; ``smoothing_window=None`` disables smoothing."""
    seq = trim_leading_offscreen(seq)
    if smoothing_window is not None:
        seq = smooth_blips(seq, smoothing_window)
    shares = time_in_zone(seq)
    return ProxemicsMetrics(
        shares=shares,
        predominant=predominant_zone(shares, tie_break),
        transitions=transition_stats(seq),
        observed_seconds=shares.total_frames * seq.frame_stride / seq.frames_per_second,
    )


def zone_sequences(aset: AnnotationSet, coder_id: str, pass_id: int) -> dict[str, ZoneSequence]:
    """Frame-ordered zone sequence per track for one (coder, pass) slice."""
    records = aset.slice(coder_id, pass_id)
    if not records:
        raise UnknownCoderPass(f"no records for coder {coder_id!r} pass {pass_id}")
    by_track: dict[str, list] = {}
    for r in records:
        by_track.setdefault(r.track_id, []).append(r)
    return {
        track: ZoneSequence(
            track_id=track,
            zones=tuple(r.zone for r in sorted(rows, key=lambda r: r.frame_index)),
            frame_stride=aset.meta.frame_stride,
            frames_per_second=aset.meta.frames_per_second,
        )
        for track, rows in sorted(by_track.items())
    }


def session_metrics(
    aset: AnnotationSet,
    coder_id: str,
    pass_id: int,
    smoothing_window: int | None = DEFAULT_SMOOTHING_WINDOW,
    tie_break: tuple[Zone, Zone, Zone] = DEFAULT_TIE_BREAK,
) -> SessionMetricsResult:
    """Metrics for every track in one slice; all-off-screen tracks are
    reported in ``skipped`` rather than raising."""
    per_track: dict[str, ProxemicsMetrics] = {}
    skipped: list[tuple[str, str]] = []
    for track, seq in zone_sequences(aset, coder_id, pass_id).items():
        try:
            per_track[track] = sequence_metrics(seq, smoothing_window, tie_break)
        except AllOffScreen:
            skipped.append((track, "AllOffScreen"))
    return SessionMetricsResult(per_track=per_track, skipped=tuple(skipped))


# -- metrics export ------------------------------------------------------

METRICS_HEADER = (
    "session_id",
    "coder_id",
    "pass_id",
    "track_id",
    "total_frames",
    "on_grid_frames",
    "share_intimate",
    "share_personal",
    "share_social",
    "offscreen_fraction",
    "predominant",
    "zone_transitions",
    "raw_changes",
    "observed_seconds",
)


class MetricsRow(NamedTuple):
    """One flattened metrics-export row, as read back from CSV."""

    session_id: str
    coder_id: str
    pass_id: int
    track_id: str
    total_frames: int
    on_grid_frames: int
    share_intimate: float
    share_personal: float
    share_social: float
    offscreen_fraction: float
    predominant: str
    zone_transitions: int
    raw_changes: int
    observed_seconds: float


def metrics_rows(
    session_id: str, coder_id: str, pass_id: int, result: SessionMetricsResult
) -> list[MetricsRow]:
    rows = []
    for track, m in sorted(result.per_track.items()):
        rows.append(
            MetricsRow(
                session_id=session_id,
                coder_id=coder_id,
                pass_id=pass_id,
                track_id=track,
                total_frames=m.shares.total_frames,
                on_grid_frames=m.shares.on_grid_frames,
                share_intimate=m.shares.intimate,
                share_personal=m.shares.personal,
                share_social=m.shares.social,
                offscreen_fraction=m.shares.offscreen_fraction,
                predominant=m.predominant.code,
                zone_transitions=m.transitions.zone_transition_count,
                raw_changes=m.transitions.raw_change_count,
                observed_seconds=m.observed_seconds,
            )
        )
    return rows


def write_metrics_csv(rows: Iterable[MetricsRow]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(METRICS_HEADER)
    for r in rows:
        writer.writerow([_cell(v) for v in r])
    return buf.getvalue().encode("utf-8")


def read_metrics_csv(data: bytes) -> list[MetricsRow]:
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    header = next(reader, None)
    if header is None or tuple(header) != METRICS_HEADER:
        raise ValueError(f"bad metrics CSV header: {header}")
    rows = []
    for row in reader:
        if not row:
            continue
        rows.append(
            MetricsRow(
                session_id=row[0],
                coder_id=row[1],
                pass_id=int(row[2]),
                track_id=row[3],
                total_frames=int(row[4]),
                on_grid_frames=int(row[5]),
                share_intimate=float(row[6]),
                share_personal=float(row[7]),
                share_social=float(row[8]),
                offscreen_fraction=float(row[9]),
                predominant=row[10],
                zone_transitions=int(row[11]),
                raw_changes=int(row[12]),
                observed_seconds=float(row[13]),
            )
        )
    return rows


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)
