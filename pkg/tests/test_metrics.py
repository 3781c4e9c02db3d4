import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from proxkit.errors import AllOffScreen, UnknownCoderPass
from proxkit.metrics import (
    MetricsRow,
    ZoneSequence,
    metrics_rows,
    predominant_zone,
    read_metrics_csv,
    sequence_metrics,
    session_metrics,
    smooth_blips,
    time_in_zone,
    transition_stats,
    trim_leading_offscreen,
    write_metrics_csv,
    zone_sequences,
)
from proxkit.model import AnnotationRecord, AnnotationSet, Zone

import naive_oracles as naive
from conftest import letters_to_zones, make_meta

LETTERS = "ipsx"


def seq(letters: str, stride=4, fps=25.0, track="t1") -> ZoneSequence:
    return ZoneSequence(track, letters_to_zones(letters), stride, fps)


def codes(sequence: ZoneSequence) -> str:
    return "".join(z.code for z in sequence.zones)


letter_sequences = st.text(alphabet=LETTERS, min_size=1, max_size=60)


class TestTrim:
    def test_leading_offscreen_removed(self):
        assert codes(trim_leading_offscreen(seq("xxip"))) == "ip"

    def test_interior_offscreen_untouched(self):
        assert codes(trim_leading_offscreen(seq("ixp"))) == "ixp"

    def test_all_offscreen_raises(self):
        with pytest.raises(AllOffScreen):
            trim_leading_offscreen(seq("xxx"))

    @given(letter_sequences)
    def test_idempotent(self, letters):
        try:
            once = trim_leading_offscreen(seq(letters))
        except AllOffScreen:
            return
        assert trim_leading_offscreen(once) == once

    @given(letter_sequences)
    def test_matches_naive(self, letters):
        expected = naive.naive_trim(list(letters))
        if expected is None:
            with pytest.raises(AllOffScreen):
                trim_leading_offscreen(seq(letters))
        else:
            assert codes(trim_leading_offscreen(seq(letters))) == "".join(expected)


class TestSmoothing:
    def test_single_blip_removed(self):
        assert codes(smooth_blips(seq("iipii"))) == "iiiii"

    def test_alternation_resolves_over_two_passes(self):
        assert codes(smooth_blips(seq("ipipi"))) == "iiiii"

    def test_all_distinct_window_keeps_original(self):
        assert codes(smooth_blips(seq("ips"))) == "ips"

    def test_shorter_than_window_unchanged(self):
        assert codes(smooth_blips(seq("ip"))) == "ip"

    def test_even_or_tiny_window_rejected(self):
        with pytest.raises(ValueError):
            smooth_blips(seq("iipii"), window=4)
        with pytest.raises(ValueError):
            smooth_blips(seq("iipii"), window=1)

    def test_window_five(self):
        # iipii window 5: center sees {i:4, p:1} -> i
        assert codes(smooth_blips(seq("iipii"), window=5)) == "iiiii"

    @given(letter_sequences)
    def test_idempotent(self, letters):
        once = smooth_blips(seq(letters))
        assert smooth_blips(once) == once

    @given(letter_sequences)
    def test_length_preserved_and_no_new_zones(self, letters):
        out = smooth_blips(seq(letters))
        assert len(out.zones) == len(letters)
        assert {z.code for z in out.zones} <= set(letters)

    @given(letter_sequences, st.sampled_from([3, 5, 7]))
    def test_matches_naive(self, letters, window):
        assert codes(smooth_blips(seq(letters), window)) == "".join(
            naive.naive_smooth(list(letters), window)
        )

    @given(letter_sequences)
    def test_endpoints_frozen(self, letters):
        out = smooth_blips(seq(letters))
        assert out.zones[0].code == letters[0]
        assert out.zones[-1].code == letters[-1]


class TestTimeInZone:
    def test_equal_split(self):
        shares = time_in_zone(seq("iipp"))
        assert (shares.intimate, shares.personal, shares.social) == (0.5, 0.5, 0.0)
        assert shares.offscreen_fraction == 0.0

    def test_offscreen_separate_denominator(self):
        shares = time_in_zone(seq("iipsssxx"))
        assert shares.intimate == pytest.approx(2 / 6, abs=1e-15)
        assert shares.personal == pytest.approx(1 / 6, abs=1e-15)
        assert shares.social == pytest.approx(3 / 6, abs=1e-15)
        assert shares.offscreen_fraction == pytest.approx(2 / 8, abs=1e-15)
        assert shares.on_grid_frames == 6
        assert shares.total_frames == 8

    def test_singleton(self):
        shares = time_in_zone(seq("s"))
        assert shares.social == 1.0
        assert shares.intimate == shares.personal == 0.0

    def test_all_offscreen_raises(self):
        with pytest.raises(AllOffScreen):
            time_in_zone(seq("xx"))

    @given(letter_sequences)
    def test_on_grid_shares_sum_to_one(self, letters):
        try:
            shares = time_in_zone(seq(letters))
        except AllOffScreen:
            return
        assert abs(shares.intimate + shares.personal + shares.social - 1.0) < 1e-9
        assert abs(shares.offscreen_fraction - (1 - shares.on_grid_frames / shares.total_frames)) < 1e-12


class TestPredominant:
    def test_unique_max(self):
        shares = time_in_zone(seq("ippppppppps"))
        assert predominant_zone(shares) is Zone.PERSONAL

    def test_two_way_tie_goes_to_closest(self):
        assert predominant_zone(time_in_zone(seq("iipp"))) is Zone.INTIMATE

    def test_three_way_tie_goes_to_intimate(self):
        assert predominant_zone(time_in_zone(seq("ips"))) is Zone.INTIMATE

    def test_custom_tie_break(self):
        shares = time_in_zone(seq("iipp"))
        order = (Zone.SOCIAL, Zone.PERSONAL, Zone.INTIMATE)
        assert predominant_zone(shares, order) is Zone.PERSONAL

    def test_never_offscreen(self):
        assert predominant_zone(time_in_zone(seq("xxsxx"))) is Zone.SOCIAL

    @given(letter_sequences, st.integers(2, 5))
    def test_invariant_under_count_rescaling(self, letters, k):
        try:
            base = predominant_zone(time_in_zone(seq(letters)))
        except AllOffScreen:
            return
        scaled = "".join(c * k for c in letters)
        assert predominant_zone(time_in_zone(seq(scaled))) is base


class TestTransitions:
    def test_direct_count(self):
        stats = transition_stats(seq("ipi"))
        assert stats.zone_transition_count == 2
        assert stats.matrix[0][1] == 1  # i -> p
        assert stats.matrix[1][0] == 1  # p -> i

    def test_constant_sequence(self):
        stats = transition_stats(seq("iii"))
        assert stats.zone_transition_count == 0
        assert stats.raw_change_count == 0
        assert stats.matrix[0][0] == 2

    def test_changes_through_offscreen_not_zone_transitions(self):
        stats = transition_stats(seq("ixp"))
        assert stats.raw_change_count == 2
        assert stats.zone_transition_count == 0

    @given(letter_sequences)
    def test_matrix_sums_to_length_minus_one(self, letters):
        stats = transition_stats(seq(letters))
        assert sum(sum(row) for row in stats.matrix) == len(letters) - 1
        assert stats.zone_transition_count <= stats.raw_change_count


class TestSessionMetrics:
    def _single_track_set(self, letters, stride=4, fps=25.0):
        meta = make_meta(group_size=1, stride=stride, fps=fps)
        records = tuple(
            AnnotationRecord("c1", 1, k * stride, "t1", Zone(c))
            for k, c in enumerate(letters)
        )
        return AnnotationSet(meta=meta, records=records)

    def test_hand_checked_example(self):
        result = session_metrics(self._single_track_set("iipp"), "c1", 1)
        m = result.per_track["t1"]
        assert (m.shares.intimate, m.shares.personal, m.shares.social) == (0.5, 0.5, 0.0)
        assert m.predominant is Zone.INTIMATE  # tie goes to the closest zone
        assert m.observed_seconds == pytest.approx(4 * 4 / 25.0, abs=1e-12)

    def test_all_offscreen_track_skipped_not_fatal(self):
        meta = make_meta(group_size=2)
        records = [
            AnnotationRecord("c1", 1, k * 4, "t1", Zone.OFF_SCREEN) for k in range(4)
        ] + [
            AnnotationRecord("c1", 1, k * 4, "t2", Zone(c)) for k, c in enumerate("ipsp")
        ]
        result = session_metrics(AnnotationSet(meta=meta, records=tuple(records)), "c1", 1)
        assert set(result.per_track) == {"t2"}
        assert result.skipped == (("t1", "AllOffScreen"),)

    def test_unknown_coder_pass(self):
        with pytest.raises(UnknownCoderPass):
            session_metrics(self._single_track_set("ip"), "nobody", 1)

    def test_sequences_ordered_by_frame(self):
        meta = make_meta(group_size=1, stride=4)
        records = (
            AnnotationRecord("c1", 1, 8, "t1", Zone.SOCIAL),
            AnnotationRecord("c1", 1, 0, "t1", Zone.INTIMATE),
            AnnotationRecord("c1", 1, 4, "t1", Zone.PERSONAL),
        )
        seqs = zone_sequences(AnnotationSet(meta=meta, records=records), "c1", 1)
        assert codes(seqs["t1"]) == "ips"

    def test_trim_applies_before_shares(self):
        result = session_metrics(self._single_track_set("xxip"), "c1", 1)
        m = result.per_track["t1"]
        assert m.shares.total_frames == 2
        assert m.observed_seconds == pytest.approx(2 * 4 / 25.0, abs=1e-12)

    def test_smoothing_can_be_disabled(self):
        result = session_metrics(self._single_track_set("iipii"), "c1", 1, smoothing_window=None)
        m = result.per_track["t1"]
        assert m.shares.personal > 0  # the blip survives


class TestOracleEquivalence:
    def assert_matches_naive(self, letters, stride=4, fps=25.0, window=3):
        expected = naive.naive_track_metrics(list(letters), stride, fps, window)
        if expected is None:
            with pytest.raises(AllOffScreen):
                sequence_metrics(seq(letters, stride, fps), window)
            return
        m = sequence_metrics(seq(letters, stride, fps), window)
        assert m.shares.on_grid_frames == expected["shares"]["on_grid"]
        assert m.shares.total_frames == expected["shares"]["total"]
        assert abs(m.shares.intimate - expected["shares"]["i"]) < 1e-12
        assert abs(m.shares.personal - expected["shares"]["p"]) < 1e-12
        assert abs(m.shares.social - expected["shares"]["s"]) < 1e-12
        assert abs(m.shares.offscreen_fraction - expected["shares"]["offscreen"]) < 1e-12
        assert m.predominant.code == expected["predominant"]
        assert m.transitions.zone_transition_count == expected["transitions"]["zone"]
        assert m.transitions.raw_change_count == expected["transitions"]["raw"]
        for a, i in zip(LETTERS, range(4)):
            for b, j in zip(LETTERS, range(4)):
                assert m.transitions.matrix[i][j] == expected["transitions"]["matrix"][(a, b)]
        assert abs(m.observed_seconds - expected["observed_seconds"]) < 1e-12

    def test_exhaustive_length_four(self):
        for letters in itertools.product(LETTERS, repeat=4):
            self.assert_matches_naive("".join(letters))

    def test_seeded_random_sequences(self):
        rng = random.Random(20240501)
        for _ in range(300):
            letters = "".join(rng.choice(LETTERS) for _ in range(rng.randint(1, 120)))
            self.assert_matches_naive(letters, stride=rng.choice((1, 2, 4)), fps=rng.choice((24.0, 25.0)))


class TestMetricsCsv:
    def test_round_trip(self):
        meta = make_meta(group_size=1)
        records = tuple(
            AnnotationRecord("c1", 1, k * 4, "t1", Zone(c)) for k, c in enumerate("iipsx")
        )
        result = session_metrics(AnnotationSet(meta=meta, records=records), "c1", 1)
        rows = metrics_rows("demo", "c1", 1, result)
        data = write_metrics_csv(rows)
        assert read_metrics_csv(data) == rows

    def test_header_checked(self):
        with pytest.raises(ValueError):
            read_metrics_csv(b"nope\n1,2\n")
