"""Coding-consistency statistics between two annotation slices.

A slice is one (coder_id, pass_id) view of a session.  Comparing two
passes by the same coder gives intracoder reliability; two coders give
intercoder reliability.  Agreement is chance-corrected with Cohen's
kappa over the full four-letter zone alphabet.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable

from .errors import EmptySlice, NoOverlap, NoPairs
from .model import ZONE_INDEX, ZONE_ORDER, AnnotationSet, Zone

SliceKey = tuple[str, int]


@dataclass(frozen=True)
class PairedLabels:
    """Zone pairs aligned on identical (frame_index, track_id)."""

    pairs: tuple[tuple[Zone, Zone], ...]
    n_unmatched_a: int
    n_unmatched_b: int

    @property
    def n_aligned(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class ReliabilityReport:
    n_pairs: int
    percent_agreement: float
    kappa: float
    confusion: tuple[tuple[int, int, int, int], ...]


def pair_labels(aset: AnnotationSet, slice_a: SliceKey, slice_b: SliceKey) -> PairedLabels:
    """Align two slices on (frame_index, track_id).

    Records present in only one slice are counted as unmatched, never
    paired; raises when either slice is empty or nothing aligns.
    """
    if slice_a == slice_b:
        raise ValueError("slice_a and slice_b must differ")
    labels_a = {(r.frame_index, r.track_id): r.zone for r in aset.slice(*slice_a)}
    labels_b = {(r.frame_index, r.track_id): r.zone for r in aset.slice(*slice_b)}
    if not labels_a:
        raise EmptySlice(f"no records for slice {slice_a}")
    if not labels_b:
        raise EmptySlice(f"no records for slice {slice_b}")
    common = sorted(labels_a.keys() & labels_b.keys())
    if not common:
        raise NoOverlap(f"slices {slice_a} and {slice_b} share no (frame, track) keys")
    pairs = tuple((labels_a[k], labels_b[k]) for k in common)
    return PairedLabels(
        pairs=pairs,
        n_unmatched_a=len(labels_a) - len(common),
        n_unmatched_b=len(labels_b) - len(common),
    )


def reliability_report(paired: PairedLabels) -> ReliabilityReport:
    """Percent agreement and Cohen's kappa from aligned pairs.

    kappa = (p_o - p_e) / (1 - p_e) with p_e from the two sides' marginal
    zone distributions.  When both sides are constant and identical,
    p_e = 1 and disagreement is impossible; kappa is defined as 1.0.
    """
    n = paired.n_aligned
    if n < 1:
        raise NoPairs("no aligned pairs")
    confusion = [[0, 0, 0, 0] for _ in ZONE_ORDER]
    for a, b in paired.pairs:
        confusion[ZONE_INDEX[a]][ZONE_INDEX[b]] += 1

    p_observed = sum(confusion[k][k] for k in range(4)) / n
    marginal_a = [sum(confusion[k][j] for j in range(4)) / n for k in range(4)]
    marginal_b = [sum(confusion[i][k] for i in range(4)) / n for k in range(4)]
    p_expected = sum(pa * pb for pa, pb in zip(marginal_a, marginal_b))
    if p_expected >= 1.0:
        kappa = 1.0
    else:
        kappa = (p_observed - p_expected) / (1.0 - p_expected)

    return ReliabilityReport(
        n_pairs=n,
        percent_agreement=p_observed,
        kappa=kappa,
        confusion=tuple(tuple(row) for row in confusion),
    )


def compare_slices(aset: AnnotationSet, slice_a: SliceKey, slice_b: SliceKey) -> tuple[PairedLabels, ReliabilityReport]:
    paired = pair_labels(aset, slice_a, slice_b)
    return paired, reliability_report(paired)


RELIABILITY_HEADER = (
    "session_id",
    "coder_a",
    "pass_a",
    "coder_b",
    "pass_b",
    "n_pairs",
    "n_unmatched_a",
    "n_unmatched_b",
    "percent_agreement",
    "kappa",
)


def write_reliability_csv(
    rows: Iterable[tuple[str, SliceKey, SliceKey, PairedLabels, ReliabilityReport]],
) -> bytes:
    """One row per compared slice pair."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RELIABILITY_HEADER)
    for session_id, a, b, paired, report in rows:
        writer.writerow(
            [
                session_id,
                a[0],
                a[1],
                b[0],
                b[1],
                report.n_pairs,
                paired.n_unmatched_a,
                paired.n_unmatched_b,
                repr(report.percent_agreement),
                repr(report.kappa),
            ]
        )
    return buf.getvalue().encode("utf-8")
