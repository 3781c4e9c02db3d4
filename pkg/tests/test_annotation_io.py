import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proxkit.annotation_io import (
    parse_annotation_file,
    parse_sidecar,
    write_annotation_file,
    write_sidecar,
)
from proxkit.errors import (
    AnnotationFormatError,
    DuplicateKey,
    InvalidSet,
    MissingHeader,
    NonMonotoneStride,
    UnknownZoneCode,
)
from proxkit.model import AgentType, AnnotationRecord, AnnotationSet, Zone, validate_annotation_set

from conftest import make_meta, random_annotation_set

HEADER = b"coder_id,pass_id,frame_index,track_id,zone,note\n"


class TestParse:
    def test_minimal_file(self, meta):
        aset = parse_annotation_file(HEADER + b"c1,1,0,t1,i,\n", meta)
        assert len(aset.records) == 1
        r = aset.records[0]
        assert r == AnnotationRecord("c1", 1, 0, "t1", Zone.INTIMATE, "")

    def test_unknown_zone_code_names_line(self, meta):
        with pytest.raises(UnknownZoneCode) as exc:
            parse_annotation_file(HEADER + b"c1,1,0,t1,i,\nc1,1,4,t1,q,\n", meta)
        assert exc.value.line == 3

    def test_duplicate_key_rejected(self, meta):
        data = HEADER + b"c1,1,0,t1,i,\nc1,1,0,t1,p,\n"
        with pytest.raises(DuplicateKey):
            parse_annotation_file(data, meta)

    def test_off_stride_frame_rejected(self, meta):
        with pytest.raises(NonMonotoneStride):
            parse_annotation_file(HEADER + b"c1,1,3,t1,i,\n", meta)

    def test_missing_header(self, meta):
        with pytest.raises(MissingHeader):
            parse_annotation_file(b"c1,1,0,t1,i,\n", meta)
        with pytest.raises(MissingHeader):
            parse_annotation_file(b"", meta)

    def test_wrong_field_count(self, meta):
        with pytest.raises(AnnotationFormatError) as exc:
            parse_annotation_file(HEADER + b"c1,1,0,t1,i\n", meta)
        assert exc.value.line == 2

    def test_non_integer_pass(self, meta):
        with pytest.raises(AnnotationFormatError):
            parse_annotation_file(HEADER + b"c1,one,0,t1,i,\n", meta)

    def test_quoted_note_with_comma(self, meta):
        data = HEADER + b'c1,1,0,t1,i,"leaned in, smiled"\n'
        aset = parse_annotation_file(data, meta)
        assert aset.records[0].note == "leaned in, smiled"

    def test_too_many_tracks_rejected(self):
        meta = make_meta(group_size=1)
        data = HEADER + b"c1,1,0,t1,i,\nc1,1,0,t2,i,\n"
        with pytest.raises(AnnotationFormatError):
            parse_annotation_file(data, meta)

    def test_bad_meta_rejected(self):
        meta = make_meta(group_size=0)
        with pytest.raises(InvalidSet):
            parse_annotation_file(HEADER, meta)


class TestWrite:
    def test_empty_set_is_header_only(self, meta):
        assert write_annotation_file(AnnotationSet(meta=meta)) == HEADER

    def test_rows_sorted(self, meta):
        records = (
            AnnotationRecord("c1", 1, 8, "t1", Zone.PERSONAL),
            AnnotationRecord("c1", 1, 0, "t1", Zone.INTIMATE),
        )
        out = write_annotation_file(AnnotationSet(meta=meta, records=records))
        assert out == HEADER + b"c1,1,0,t1,i,\nc1,1,8,t1,p,\n"

    def test_invalid_set_rejected(self):
        meta = make_meta(stride=4)
        records = (AnnotationRecord("c1", 1, 2, "t1", Zone.INTIMATE),)
        with pytest.raises(InvalidSet):
            write_annotation_file(AnnotationSet(meta=meta, records=records))


class TestRoundTrip:
    def test_seeded_sets_round_trip_byte_exact(self):
        for seed in range(100):
            rng = random.Random(seed)
            aset = random_annotation_set(rng)
            data = write_annotation_file(aset)
            reparsed = parse_annotation_file(data, aset.meta)
            assert reparsed == aset, f"seed {seed}"
            assert write_annotation_file(reparsed) == data, f"seed {seed}"

    def test_parse_accepts_exactly_the_valid_sets(self):
        # validate() and parse() agree: zero errors <=> parse succeeds
        rng = random.Random(7)
        aset = random_annotation_set(rng)
        assert validate_annotation_set(aset).ok
        parse_annotation_file(write_annotation_file(aset), aset.meta)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_round_trip_property(self, seed):
        aset = random_annotation_set(random.Random(seed), max_tracks=2, max_frames=8)
        data = write_annotation_file(aset)
        assert parse_annotation_file(data, aset.meta) == aset
        assert write_annotation_file(parse_annotation_file(data, aset.meta)) == data

    @given(
        st.text(
            alphabet=st.characters(min_codepoint=32, max_codepoint=0x2FF),
            max_size=40,
        )
        | st.sampled_from(['a,b', '"quoted"', 'line\nbreak', 'ümlaut, ok'])
    )
    @settings(max_examples=60, deadline=None)
    def test_notes_survive_quoting(self, note):
        meta = make_meta(group_size=1)
        aset = AnnotationSet(
            meta=meta, records=(AnnotationRecord("c1", 1, 0, "t1", Zone.SOCIAL, note),)
        )
        reparsed = parse_annotation_file(write_annotation_file(aset), meta)
        assert reparsed.records[0].note == note


class TestSidecar:
    def test_round_trip(self):
        meta = make_meta(session_id="s42", group_size=4, stride=2, fps=30.0, agent=AgentType.VIRTUAL)
        text = write_sidecar(meta)
        assert parse_sidecar(text) == meta
        assert write_sidecar(parse_sidecar(text)) == text

    def test_fps_defaults_with_warning(self):
        text = "session_id = s1\nagent_type = robot\ngroup_size = 2\n"
        with pytest.warns(UserWarning, match="fps"):
            meta = parse_sidecar(text)
        assert meta.frames_per_second == 25.0
        assert meta.frame_stride == 4
        assert meta.grid_size_cm == (150, 150)

    def test_rational_fps(self):
        text = "session_id = s1\nagent_type = robot\ngroup_size = 1\nfps = 30000/1001\n"
        meta = parse_sidecar(text)
        assert meta.frames_per_second == pytest.approx(29.97, abs=0.01)

    def test_missing_required_key(self):
        with pytest.raises(AnnotationFormatError):
            parse_sidecar("session_id = s1\nagent_type = robot\n")

    def test_bad_agent_type(self):
        with pytest.raises(AnnotationFormatError):
            parse_sidecar("session_id = s1\nagent_type = drone\ngroup_size = 1\nfps = 25\n")

    def test_partial_flag_written_and_ignored_on_parse(self):
        meta = make_meta()
        text = write_sidecar(meta, partial=True)
        assert "partial = true" in text
        assert parse_sidecar(text) == meta
