"""proxkit: zone-coding analysis toolkit for group-agent interaction studies."""

from .model import (
    AgentType,
    AnnotationRecord,
    AnnotationSet,
    SessionMeta,
    ValidationReport,
    Zone,
    ZONE_ORDER,
    validate_annotation_set,
)
from .annotation_io import (
    parse_annotation_file,
    parse_sidecar,
    read_session,
    write_annotation_file,
    write_sidecar,
)
from .metrics import (
    ProxemicsMetrics,
    SessionMetricsResult,
    TransitionStats,
    ZoneSequence,
    ZoneShares,
    predominant_zone,
    sequence_metrics,
    session_metrics,
    smooth_blips,
    time_in_zone,
    transition_stats,
    trim_leading_offscreen,
    zone_sequences,
)
from .reliability import PairedLabels, ReliabilityReport, pair_labels, reliability_report
from .survey import (
    BondingMeasure,
    CanvasPlacement,
    ScaleDefinition,
    SurveyRecord,
    canvas_bonding,
    parse_survey_file,
    score_gas,
)
from .triangulate import (
    CorrelationReport,
    LinkTable,
    TriangulatedTable,
    correlate,
    correlation_report,
    join_triangulated,
    z_standardize,
)
from .synth import GeneratorConfig, SyntheticSession, generate_corpus, generate_session

__version__ = "0.1.0"

__all__ = [
    "AgentType",
    "AnnotationRecord",
    "AnnotationSet",
    "BondingMeasure",
    "CanvasPlacement",
    "CorrelationReport",
    "GeneratorConfig",
    "LinkTable",
    "PairedLabels",
    "ProxemicsMetrics",
    "ReliabilityReport",
    "ScaleDefinition",
    "SessionMeta",
    "SessionMetricsResult",
    "SurveyRecord",
    "SyntheticSession",
    "TransitionStats",
    "TriangulatedTable",
    "ValidationReport",
    "Zone",
    "ZONE_ORDER",
    "ZoneSequence",
    "ZoneShares",
    "canvas_bonding",
    "correlate",
    "correlation_report",
    "generate_corpus",
    "generate_session",
    "join_triangulated",
    "pair_labels",
    "parse_annotation_file",
    "parse_sidecar",
    "parse_survey_file",
    "predominant_zone",
    "read_session",
    "reliability_report",
    "score_gas",
    "sequence_metrics",
    "session_metrics",
    "smooth_blips",
    "time_in_zone",
    "transition_stats",
    "trim_leading_offscreen",
    "validate_annotation_set",
    "write_annotation_file",
    "write_sidecar",
    "z_standardize",
    "zone_sequences",
]
