import pytest

from proxkit.annotation_io import write_annotation_file, write_sidecar
from proxkit.errors import InvalidConfig
from proxkit.metrics import session_metrics
from proxkit.model import validate_annotation_set
from proxkit.survey import canvas_bonding, parse_survey_file, write_survey_file
from proxkit.synth import (
    DEFAULT_BASE_TRANSITION,
    GeneratorConfig,
    blend_transition,
    generate_corpus,
    generate_session,
    iter_sessions,
    parse_generator_config,
    write_corpus,
)
from proxkit.triangulate import LinkTable, correlate, parse_link_csv


def serialize(session):
    chunks = [write_annotation_file(session.annotation), write_sidecar(session.annotation.meta).encode()]
    chunks.append(write_survey_file(session.survey, GeneratorConfig().scale, GeneratorConfig().canvas_mm))
    return b"".join(chunks)


class TestConfig:
    def test_default_config_valid(self):
        generate_session(GeneratorConfig(), "s0001")

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"group_size_weights": {1: 0.5, 2: 0.6}},
            {"group_size_weights": {0: 1.0}},
            {"coupling": 1.5},
            {"session_frames": 0},
            {"frame_stride": 0},
            {"base_transition": ((1.0, 0.0, 0.0, 0.0),) * 3},
            {"base_transition": ((0.5, 0.5, 0.1, -0.1),) + ((0.25,) * 4,) * 3},
            {"canvas_mm": (100.0, 100.0)},
        ],
    )
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(InvalidConfig):
            generate_session(GeneratorConfig(**kwargs), "s0001")

    def test_parse_generator_config(self):
        text = (
            "seed = 99\n"
            "coupling = 0.5\n"
            "session_frames = 40\n"
            "group_size_weights = 1:0.5,2:0.5\n"
            "base_transition = 0.7,0.1,0.1,0.1/0.1,0.7,0.1,0.1/0.1,0.1,0.7,0.1/0.1,0.1,0.1,0.7\n"
        )
        config = parse_generator_config(text)
        assert config.seed == 99
        assert config.coupling == 0.5
        assert config.group_size_weights == {1: 0.5, 2: 0.5}
        assert config.base_transition[0][0] == 0.7

    def test_parse_bad_config(self):
        with pytest.raises(InvalidConfig):
            parse_generator_config("coupling = high\n")


class TestBlend:
    @pytest.mark.parametrize("weight", [0.0, 0.25, 0.5, 0.99, 1.0])
    def test_rows_stay_stochastic(self, weight):
        blended = blend_transition(DEFAULT_BASE_TRANSITION, weight)
        for row in blended:
            assert abs(sum(row) - 1.0) <= 1e-12
            assert all(p >= 0 for p in row)

    def test_weight_one_is_absorbing(self):
        blended = blend_transition(DEFAULT_BASE_TRANSITION, 1.0)
        for row in blended:
            assert row == (1.0, 0.0, 0.0, 0.0)

    def test_weight_zero_is_base(self):
        assert blend_transition(DEFAULT_BASE_TRANSITION, 0.0) == DEFAULT_BASE_TRANSITION


class TestGenerateSession:
    def test_deterministic_byte_identical(self):
        config = GeneratorConfig()
        a = generate_session(config, "s0042")
        b = generate_session(config, "s0042")
        assert serialize(a) == serialize(b)
        assert a.ground_truth_bonding == b.ground_truth_bonding

    def test_different_session_ids_differ(self):
        config = GeneratorConfig()
        assert serialize(generate_session(config, "s0001")) != serialize(
            generate_session(config, "s0002")
        )

    def test_annotation_passes_validation(self):
        for sid in ("s0001", "s0002", "s0003"):
            session = generate_session(GeneratorConfig(), sid)
            assert validate_annotation_set(session.annotation).ok

    def test_survey_matches_group_size(self):
        session = generate_session(GeneratorConfig(), "s0007")
        size = session.annotation.meta.group_size
        assert len(session.survey) == size
        assert len(session.ground_truth_bonding) == size
        for record in session.survey:
            assert record.placement("self") is not None
            assert record.placement("agent") is not None
            # one marker per fellow member
            members = [p for p in record.placements if p.entity_id.startswith("member-")]
            assert len(members) == size - 1

    def test_stride_alignment(self):
        session = generate_session(GeneratorConfig(frame_stride=4, session_frames=10), "s0001")
        frames = sorted({r.frame_index for r in session.annotation.records})
        assert frames == [k * 4 for k in range(10)]

    def test_distance_decreases_in_bonding(self):
        config = GeneratorConfig()
        pairs = []
        for session in iter_sessions(config, 60):
            bond = {r.participant_id: canvas_bonding(r, config.scale) for r in session.survey}
            for link in session.link_rows():
                b = session.ground_truth_bonding[link.track_id]
                pairs.append((b, bond[link.participant_id].distance_to_agent_mm))
            # planted map: distance = 100(1-b) + noise in [-5, 5]
        for b, d in pairs:
            assert abs(d - 100 * (1 - b)) <= 5.0 + 1e-9

    def test_survey_round_trips_through_parser(self):
        config = GeneratorConfig()
        session = generate_session(config, "s0005")
        data = write_survey_file(session.survey, config.scale, config.canvas_mm)
        assert parse_survey_file(data, config.scale) == list(session.survey)


class TestCorpus:
    def test_single_session_corpus_matches_generate_session(self):
        config = GeneratorConfig()
        corpus = generate_corpus(config, 1)
        assert len(corpus) == 1
        assert serialize(corpus[0]) == serialize(generate_session(config, "s0001"))

    def test_composition_quick_check(self):
        # acceptance runs the full 10k; this is the fast regression guard
        multi = sum(
            1 for s in iter_sessions(GeneratorConfig(), 1500) if s.annotation.meta.group_size >= 2
        )
        assert 0.50 <= multi / 1500 <= 0.60

    def test_n_sessions_validated(self):
        with pytest.raises(InvalidConfig):
            generate_corpus(GeneratorConfig(), 0)

    def test_write_corpus_layout(self, tmp_path):
        config = GeneratorConfig(session_frames=20)
        write_corpus(generate_corpus(config, 3), tmp_path, config)
        assert sorted(p.name for p in (tmp_path / "sessions").iterdir()) == [
            "s0001.csv", "s0001.meta", "s0002.csv", "s0002.meta", "s0003.csv", "s0003.meta",
        ]
        assert (tmp_path / "survey.csv").exists()
        assert (tmp_path / "scale.txt").exists()
        link = parse_link_csv((tmp_path / "link.csv").read_bytes())
        assert isinstance(link, LinkTable)
        assert len(link.rows) >= 3

    def test_planted_coupling_smoke(self):
        # small-n sanity check; the acceptance suite runs the full 187-session corpus
        config = GeneratorConfig(coupling=1.0)
        dist, intim = [], []
        for session in iter_sessions(config, 60):
            result = session_metrics(session.annotation, "synth", 1)
            bond = {r.participant_id: canvas_bonding(r, config.scale) for r in session.survey}
            for link in session.link_rows():
                if link.track_id in result.per_track:
                    dist.append(bond[link.participant_id].distance_to_agent_mm)
                    intim.append(result.per_track[link.track_id].shares.intimate)
        _, rho = correlate(dist, intim)
        assert rho < -0.5
