"""Joining behavioral metrics with survey bonding, and correlation reports.

Behavioral rows are keyed by (session_id, track_id), survey rows by
(session_id, participant_id); a manually curated link table maps between
the two.  Joined rows get a z-standardized twin for every numeric column
so percentage-, count- and millimeter-scaled variables are comparable.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import (
    AmbiguousMetricsKey,
    ConstantColumn,
    ConstantInput,
    DanglingReference,
    DuplicateLinkKey,
    LengthMismatch,
    TooFewValues,
)
from .metrics import MetricsRow
from .survey import BondingMeasure


class LinkRow(NamedTuple):
    session_id: str
    participant_id: str
    track_id: str


@dataclass(frozen=True)
class LinkTable:
    rows: tuple[LinkRow, ...]

    def __post_init__(self):
        seen_p: set[tuple[str, str]] = set()
        seen_t: set[tuple[str, str]] = set()
        for r in self.rows:
            if (r.session_id, r.participant_id) in seen_p:
                raise DuplicateLinkKey(f"duplicate (session, participant): {r.session_id}, {r.participant_id}")
            if (r.session_id, r.track_id) in seen_t:
                raise DuplicateLinkKey(f"duplicate (session, track): {r.session_id}, {r.track_id}")
            seen_p.add((r.session_id, r.participant_id))
            seen_t.add((r.session_id, r.track_id))


LINK_HEADER = ("session_id", "participant_id", "track_id")

PROXIMITY_VARIABLES = (
    "share_intimate",
    "share_personal",
    "share_social",
    "offscreen_fraction",
    "zone_transitions",
    "raw_changes",
    "observed_seconds",
)
BONDING_VARIABLES = ("gas_score", "distance_to_agent_mm")
NUMERIC_VARIABLES = PROXIMITY_VARIABLES + BONDING_VARIABLES


def parse_link_csv(data: bytes) -> LinkTable:
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    header = next(reader, None)
    if header is None or tuple(header) != LINK_HEADER:
        raise ValueError(f"bad link CSV header: {header}")
    rows = tuple(LinkRow(*row) for row in reader if row)
    return LinkTable(rows=rows)


def write_link_csv(link: LinkTable) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LINK_HEADER)
    for r in link.rows:
        writer.writerow(list(r))
    return buf.getvalue().encode("utf-8")


@dataclass(frozen=True)
class TriangulatedRow:
    session_id: str
    participant_id: str
    track_id: str
    values: dict[str, float | None]


@dataclass(frozen=True)
class JoinReport:
    """What the inner join left out; never silently dropped."""

    unmatched_metrics: tuple[tuple[str, str], ...] = ()   # (session_id, track_id)
    unmatched_bonding: tuple[tuple[str, str], ...] = ()   # (session_id, participant_id)
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class TriangulatedTable:
    """Joined per-participant rows with z-standardized twin columns."""

    rows: tuple[TriangulatedRow, ...]
    columns: tuple[str, ...] = field(default=NUMERIC_VARIABLES)

    def column(self, name: str) -> list[float | None]:
        return [r.values.get(name) for r in self.rows]


def join_triangulated(
    metrics: Sequence[MetricsRow],
    bonding: Sequence[BondingMeasure],
    link: LinkTable,
) -> tuple[TriangulatedTable, JoinReport]:
    """Inner join of behavior and self-report through the link table.

    Raises DanglingReference for link rows pointing at missing data and
    AmbiguousMetricsKey when several metrics rows (e.g. multiple coders
    or passes) share one (session, track); filter the export first.
    """
    metrics_by_key: dict[tuple[str, str], MetricsRow] = {}
    for m in metrics:
        key = (m.session_id, m.track_id)
        if key in metrics_by_key:
            raise AmbiguousMetricsKey(
                f"multiple metrics rows for session {m.session_id!r} track {m.track_id!r};"
                " restrict to one (coder, pass) slice"
            )
        metrics_by_key[key] = m
    bonding_by_key = {}
    for b in bonding:
        key = (b.session_id, b.participant_id)
        if key in bonding_by_key:
            raise DuplicateLinkKey(f"multiple bonding rows for {key}")
        bonding_by_key[key] = b

    rows = []
    used_metrics: set[tuple[str, str]] = set()
    used_bonding: set[tuple[str, str]] = set()
    for lr in link.rows:
        m_key = (lr.session_id, lr.track_id)
        b_key = (lr.session_id, lr.participant_id)
        if m_key not in metrics_by_key:
            raise DanglingReference(f"link references missing metrics row {m_key}")
        if b_key not in bonding_by_key:
            raise DanglingReference(f"link references missing bonding row {b_key}")
        used_metrics.add(m_key)
        used_bonding.add(b_key)
        m, b = metrics_by_key[m_key], bonding_by_key[b_key]
        values: dict[str, float | None] = {
            "share_intimate": m.share_intimate,
            "share_personal": m.share_personal,
            "share_social": m.share_social,
            "offscreen_fraction": m.offscreen_fraction,
            "zone_transitions": float(m.zone_transitions),
            "raw_changes": float(m.raw_changes),
            "observed_seconds": m.observed_seconds,
            "gas_score": b.gas_score,
            "distance_to_agent_mm": b.distance_to_agent_mm,
        }
        rows.append(
            TriangulatedRow(
                session_id=lr.session_id,
                participant_id=lr.participant_id,
                track_id=lr.track_id,
                values=values,
            )
        )

    notes: list[str] = []
    table = _with_z_columns(TriangulatedTable(rows=tuple(rows)), notes)
    report = JoinReport(
        unmatched_metrics=tuple(sorted(set(metrics_by_key) - used_metrics)),
        unmatched_bonding=tuple(sorted(set(bonding_by_key) - used_bonding)),
        notes=tuple(notes),
    )
    return table, report


def _with_z_columns(table: TriangulatedTable, notes: list[str]) -> TriangulatedTable:
    z_values: dict[str, list[float | None]] = {}
    for name in NUMERIC_VARIABLES:
        column = table.column(name)
        present = [v for v in column if v is not None]
        try:
            z_present = z_standardize(present)
        except (TooFewValues, ConstantColumn) as exc:
            notes.append(f"z_{name} unavailable: {exc}")
            z_values[f"z_{name}"] = [None] * len(column)
            continue
        it = iter(z_present)
        z_values[f"z_{name}"] = [next(it) if v is not None else None for v in column]

    new_rows = []
    for i, r in enumerate(table.rows):
        merged = dict(r.values)
        for z_name, col in z_values.items():
            merged[z_name] = col[i]
        new_rows.append(TriangulatedRow(r.session_id, r.participant_id, r.track_id, merged))
    columns = NUMERIC_VARIABLES + tuple(f"z_{n}" for n in NUMERIC_VARIABLES)
    return TriangulatedTable(rows=tuple(new_rows), columns=columns)


def aggregate_by_session(table: TriangulatedTable) -> TriangulatedTable:
    """Optional pre-step: collapse to one row per session (column means).

    z-columns are recomputed over the aggregated rows.
    """
    by_session: dict[str, list[TriangulatedRow]] = {}
    for r in table.rows:
        by_session.setdefault(r.session_id, []).append(r)
    rows = []
    for session_id in sorted(by_session):
        group = by_session[session_id]
        values: dict[str, float | None] = {}
        for name in NUMERIC_VARIABLES:
            present = [r.values[name] for r in group if r.values.get(name) is not None]
            values[name] = sum(present) / len(present) if present else None
        rows.append(TriangulatedRow(session_id, "", "", values))
    notes: list[str] = []
    return _with_z_columns(TriangulatedTable(rows=tuple(rows)), notes)


def z_standardize(column: Sequence[float]) -> list[float]:
    """(x - mean) / s with the sample (n-1) standard deviation."""
    n = len(column)
    if n < 2:
        raise TooFewValues(f"need at least 2 values, got {n}")
    mean = sum(column) / n
    variance = sum((x - mean) ** 2 for x in column) / (n - 1)
    if variance == 0.0:
        raise ConstantColumn("column has zero variance")
    s = math.sqrt(variance)
    return [(x - mean) / s for x in column]


def _pearson(x: Sequence[float], y: Sequence[float]) -> float:
    n = len(x)
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    cov = sum((a - mean_x) * (b - mean_y) for a, b in zip(x, y))
    var_x = sum((a - mean_x) ** 2 for a in x)
    var_y = sum((b - mean_y) ** 2 for b in y)
    if var_x == 0.0 or var_y == 0.0:
        raise ConstantInput("correlation undefined for a constant input")
    return cov / math.sqrt(var_x * var_y)


def midranks(values: Sequence[float]) -> list[float]:
    """Ranks 1..n with ties assigned the average of their positions."""
    order = sorted(range(len(values)), key=lambda k: values[k])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1  # average of 1-based positions i+1 .. j+1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def correlate(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """(Pearson r, Spearman rho); Spearman is Pearson on midranks."""
    if len(x) != len(y):
        raise LengthMismatch(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise TooFewValues(f"need at least 3 pairs, got {len(x)}")
    pearson_r = _pearson(x, y)
    spearman_rho = _pearson(midranks(x), midranks(y))
    return pearson_r, spearman_rho


class CorrelationRow(NamedTuple):
    variable_x: str
    variable_y: str
    n: int
    pearson_r: float
    spearman_rho: float


@dataclass(frozen=True)
class CorrelationReport:
    rows: tuple[CorrelationRow, ...]
    skipped: tuple[tuple[str, str, str], ...] = ()  # (x, y, reason)


def correlation_report(
    table: TriangulatedTable, pairs: Iterable[tuple[str, str]] | None = None
) -> CorrelationReport:
    """Correlate variable pairs with pairwise deletion of missing rows.

    Default pairs: every proximity variable against every bonding
    variable.  Pairs with fewer than 3 complete rows or a constant side
    are skipped with a reason, never reported.
    """
    if pairs is None:
        pairs = [(px, by) for px in PROXIMITY_VARIABLES for by in BONDING_VARIABLES]
    rows = []
    skipped = []
    for x_name, y_name in pairs:
        if x_name not in table.columns or y_name not in table.columns:
            missing = x_name if x_name not in table.columns else y_name
            skipped.append((x_name, y_name, f"unknown column {missing!r}"))
            continue
        xs, ys = [], []
        for x, y in zip(table.column(x_name), table.column(y_name)):
            if x is not None and y is not None:
                xs.append(x)
                ys.append(y)
        try:
            r, rho = correlate(xs, ys)
        except (TooFewValues, ConstantInput) as exc:
            skipped.append((x_name, y_name, str(exc)))
            continue
        rows.append(CorrelationRow(x_name, y_name, len(xs), r, rho))
    return CorrelationReport(rows=tuple(rows), skipped=tuple(skipped))


# -- CSV forms ---------------------------------------------------------

CORRELATION_HEADER = ("variable_x", "variable_y", "n", "pearson_r", "spearman_rho")


def write_correlation_csv(report: CorrelationReport) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CORRELATION_HEADER)
    for r in report.rows:
        writer.writerow([r.variable_x, r.variable_y, r.n, repr(r.pearson_r), repr(r.spearman_rho)])
    return buf.getvalue().encode("utf-8")


def write_triangulated_csv(table: TriangulatedTable) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("session_id", "participant_id", "track_id") + table.columns)
    for r in table.rows:
        cells = [r.session_id, r.participant_id, r.track_id]
        for name in table.columns:
            v = r.values.get(name)
            cells.append("" if v is None else repr(v))
        writer.writerow(cells)
    return buf.getvalue().encode("utf-8")


def read_triangulated_csv(data: bytes) -> TriangulatedTable:
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    header = next(reader, None)
    if header is None or tuple(header[:3]) != ("session_id", "participant_id", "track_id"):
        raise ValueError(f"bad triangulated CSV header: {header}")
    columns = tuple(header[3:])
    rows = []
    for row in reader:
        if not row:
            continue
        values = {
            name: (float(cell) if cell != "" else None)
            for name, cell in zip(columns, row[3:])
        }
        rows.append(TriangulatedRow(row[0], row[1], row[2], values))
    return TriangulatedTable(rows=tuple(rows), columns=columns)
