"""Command-line entry point tying the pipeline together.

Subcommands mirror the analysis flow: ``validate`` and ``metrics`` for
annotation files, ``reliability`` for coder consistency, ``survey`` for
bonding scores, ``join`` and ``correlate`` for triangulation, plus
``generate`` (synthetic study) and ``serve`` (annotation HTTP service).

Report subcommands write their delimited output to ``--out`` and render
companion figures next to it (``--figures DIR`` relocates them,
``--no-figures`` suppresses them).  Exit codes: 0 success, 1 data or
validation errors, 2 usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import figures
from .annotation_io import read_session
from .config import load_settings, parse_smoothing_window, parse_tie_break
from .errors import ProxkitError
from .metrics import (
    MetricsRow,
    metrics_rows,
    read_metrics_csv,
    session_metrics,
    write_metrics_csv,
)
from .model import validate_annotation_set
from .reliability import compare_slices, write_reliability_csv
from .survey import (
    canvas_bonding,
    parse_scale_definition,
    parse_survey_file,
    read_bonding_csv,
    write_bonding_csv,
)
from .synth import GeneratorConfig, generate_corpus, parse_generator_config, write_corpus
from .triangulate import (
    aggregate_by_session,
    correlation_report,
    join_triangulated,
    parse_link_csv,
    read_triangulated_csv,
    write_correlation_csv,
    write_triangulated_csv,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxkit",
        description="zone-coding pipeline for group-agent interaction studies",
    )
    parser.add_argument("--config", help="pipeline config file (or set PROXKIT_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an annotation file against every invariant")
    p.add_argument("annotation", type=Path)
    p.add_argument("--meta", type=Path, help="sidecar path (default: annotation with .meta suffix)")

    p = sub.add_parser("metrics", help="per-track proximity metrics export")
    p.add_argument("annotation", type=Path)
    p.add_argument("--meta", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--coder", help="restrict to one coder")
    p.add_argument("--pass", dest="pass_id", type=int, help="restrict to one pass")
    p.add_argument("--window", help="smoothing window (odd >= 3, 0 disables)")
    p.add_argument("--tie-break", help="predominant-zone priority, e.g. ips")
    _figure_flags(p)

    p = sub.add_parser("reliability", help="agreement and kappa between two slices")
    p.add_argument("annotation", type=Path)
    p.add_argument("--meta", type=Path)
    p.add_argument("--a", required=True, metavar="CODER:PASS")
    p.add_argument("--b", required=True, metavar="CODER:PASS")
    p.add_argument("--out", type=Path)
    _figure_flags(p)

    p = sub.add_parser("survey", help="score scale responses and canvas distances")
    p.add_argument("survey", type=Path)
    p.add_argument("--scale", type=Path, help="scale definition file")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("join", help="join metrics and bonding through a link table")
    p.add_argument("--metrics", type=Path, required=True)
    p.add_argument("--bonding", type=Path, required=True)
    p.add_argument("--link", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--group-mean", action="store_true",
                   help="aggregate to one row per session before standardizing")

    p = sub.add_parser("correlate", help="correlation report over a triangulated table")
    p.add_argument("table", type=Path)
    p.add_argument("--pairs", help="comma-separated x:y column pairs (default: proximity x bonding)")
    p.add_argument("--out", type=Path)
    _figure_flags(p)

    p = sub.add_parser("generate", help="write a synthetic study directory")
    p.add_argument("--config", dest="generator_config", default="default",
                   metavar="FILE|default")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--sessions", type=int, default=187)

    p = sub.add_parser("serve", help="run the annotation HTTP service")
    p.add_argument("--frames", type=Path, required=True, help="root directory of frame images")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _figure_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--figures", type=Path, help="directory for figures (default: next to --out)")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")


def _figure_dir(args) -> Path | None:
    if args.no_figures:
        return None
    if args.figures is not None:
        args.figures.mkdir(parents=True, exist_ok=True)
        return args.figures
    if getattr(args, "out", None) is not None:
        return args.out.parent
    return None


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_settings(args.config)
        return _COMMANDS[args.command](args, settings)
    except ProxkitError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


def cmd_validate(args, settings) -> int:
    aset = read_session(args.annotation, args.meta)
    report = validate_annotation_set(aset)
    for loc, message in report.errors:
        print(f"error {loc}: {message}")
    for loc, message in report.warnings:
        print(f"warning {loc}: {message}")
    if report.ok:
        print(f"ok: {len(aset.records)} records, {len(aset.coder_passes())} slice(s)")
        return 0
    return 1


def _effective_window(args, settings):
    if getattr(args, "window", None) is not None:
        return parse_smoothing_window(args.window)
    return settings.smoothing_window


def _effective_tie_break(args, settings):
    if getattr(args, "tie_break", None) is not None:
        return parse_tie_break(args.tie_break)
    return settings.tie_break


def cmd_metrics(args, settings) -> int:
    aset = read_session(args.annotation, args.meta)
    window = _effective_window(args, settings)
    tie_break = _effective_tie_break(args, settings)

    slices = aset.coder_passes()
    if args.coder is not None:
        slices = tuple(s for s in slices if s[0] == args.coder)
    if args.pass_id is not None:
        slices = tuple(s for s in slices if s[1] == args.pass_id)
    if not slices:
        print("no matching (coder, pass) slices", file=sys.stderr)
        return 1

    all_rows: list[MetricsRow] = []
    results = {}
    for coder_id, pass_id in slices:
        result = session_metrics(aset, coder_id, pass_id, window, tie_break)
        results[(coder_id, pass_id)] = result
        for track, reason in result.skipped:
            print(f"skipped {aset.meta.session_id}/{coder_id}:{pass_id}/{track}: {reason}",
                  file=sys.stderr)
        all_rows.extend(metrics_rows(aset.meta.session_id, coder_id, pass_id, result))

    if settings.share_denominator == "total":
        all_rows = [_total_denominator(r) for r in all_rows]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_bytes(write_metrics_csv(all_rows))
    print(f"wrote {args.out} ({len(all_rows)} rows)", file=sys.stderr)

    fig_dir = _figure_dir(args)
    if fig_dir is not None and all_rows:
        stem = args.out.stem
        for (coder_id, pass_id), result in results.items():
            rows = [r for r in all_rows if r.coder_id == coder_id and r.pass_id == pass_id]
            if not rows:
                continue
            shares_path = fig_dir / f"{stem}.shares.{coder_id}-{pass_id}.png"
            figures.zone_share_figure(rows, shares_path)
            summed = figures.sum_matrices(
                m.transitions.matrix for m in result.per_track.values()
            )
            heat_path = fig_dir / f"{stem}.transitions.{coder_id}-{pass_id}.png"
            figures.matrix_heatmap(summed, heat_path, title=f"transitions {coder_id}:{pass_id}")
            print(f"wrote {shares_path}", file=sys.stderr)
            print(f"wrote {heat_path}", file=sys.stderr)
    return 0


def _total_denominator(row: MetricsRow) -> MetricsRow:
    # reporting variant: shares over all frames instead of on-grid frames
    scale = row.on_grid_frames / row.total_frames if row.total_frames else 0.0
    return row._replace(
        share_intimate=row.share_intimate * scale,
        share_personal=row.share_personal * scale,
        share_social=row.share_social * scale,
    )


def _parse_slice(spec: str) -> tuple[str, int]:
    coder, sep, pass_str = spec.partition(":")
    if not sep or not coder:
        raise ValueError(f"slice must look like coder:pass, got {spec!r}")
    return coder, int(pass_str)


def cmd_reliability(args, settings) -> int:
    aset = read_session(args.annotation, args.meta)
    slice_a = _parse_slice(args.a)
    slice_b = _parse_slice(args.b)
    paired, report = compare_slices(aset, slice_a, slice_b)
    print(f"n_pairs: {report.n_pairs}")
    print(f"unmatched: a={paired.n_unmatched_a} b={paired.n_unmatched_b}")
    print(f"percent_agreement: {report.percent_agreement:.6f}")
    print(f"kappa: {report.kappa:.6f}")
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_bytes(
            write_reliability_csv([(aset.meta.session_id, slice_a, slice_b, paired, report)])
        )
        print(f"wrote {args.out}", file=sys.stderr)
    fig_dir = _figure_dir(args)
    if fig_dir is not None and args.out is not None:
        path = fig_dir / f"{args.out.stem}.confusion.png"
        figures.matrix_heatmap(report.confusion, path,
                               title=f"confusion {args.a} vs {args.b}")
        print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_survey(args, settings) -> int:
    scale_path = args.scale if args.scale is not None else settings.scale_path
    if scale_path is None:
        print("usage error: --scale is required (or set scale in the config file)", file=sys.stderr)
        return 2
    scale = parse_scale_definition(Path(scale_path).read_text(encoding="utf-8"))
    records = parse_survey_file(args.survey.read_bytes(), scale)
    measures = [canvas_bonding(r, scale) for r in records]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_bytes(write_bonding_csv(measures))
    print(f"wrote {args.out} ({len(measures)} rows)", file=sys.stderr)
    return 0


def cmd_join(args, settings) -> int:
    metrics = read_metrics_csv(args.metrics.read_bytes())
    bonding = read_bonding_csv(args.bonding.read_bytes())
    link = parse_link_csv(args.link.read_bytes())
    table, report = join_triangulated(metrics, bonding, link)
    if args.group_mean:
        table = aggregate_by_session(table)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_bytes(write_triangulated_csv(table))
    print(f"wrote {args.out} ({len(table.rows)} rows)", file=sys.stderr)
    for session_id, track_id in report.unmatched_metrics:
        print(f"unmatched metrics row: session {session_id} track {track_id}", file=sys.stderr)
    for session_id, participant_id in report.unmatched_bonding:
        print(f"unmatched bonding row: session {session_id} participant {participant_id}",
              file=sys.stderr)
    for note in report.notes:
        print(f"note: {note}", file=sys.stderr)
    return 0


def cmd_correlate(args, settings) -> int:
    table = read_triangulated_csv(args.table.read_bytes())
    pairs = None
    if args.pairs:
        pairs = []
        for chunk in args.pairs.split(","):
            x, sep, y = chunk.partition(":")
            if not sep:
                raise ValueError(f"pair must look like x:y, got {chunk!r}")
            pairs.append((x.strip(), y.strip()))
    report = correlation_report(table, pairs)
    print("variable_x,variable_y,n,pearson_r,spearman_rho")
    for row in report.rows:
        print(f"{row.variable_x},{row.variable_y},{row.n},{row.pearson_r:.6f},{row.spearman_rho:.6f}")
    for x, y, reason in report.skipped:
        print(f"skipped {x} vs {y}: {reason}", file=sys.stderr)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_bytes(write_correlation_csv(report))
        print(f"wrote {args.out}", file=sys.stderr)
    fig_dir = _figure_dir(args)
    if fig_dir is not None and args.out is not None and report.rows:
        paths = figures.correlation_scatter_figures(table, report, fig_dir, args.out.stem)
        for path in paths:
            print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_generate(args, settings) -> int:
    if args.generator_config == "default":
        config = GeneratorConfig()
    else:
        config = parse_generator_config(Path(args.generator_config).read_text(encoding="utf-8"))
    sessions = generate_corpus(config, args.sessions)
    write_corpus(sessions, args.out_dir, config)
    n_members = sum(s.annotation.meta.group_size for s in sessions)
    print(f"wrote {args.out_dir}: {len(sessions)} sessions, {n_members} members", file=sys.stderr)
    return 0


def cmd_serve(args, settings) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(frames_root=args.frames)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "validate": cmd_validate,
    "metrics": cmd_metrics,
    "reliability": cmd_reliability,
    "survey": cmd_survey,
    "join": cmd_join,
    "correlate": cmd_correlate,
    "generate": cmd_generate,
    "serve": cmd_serve,
}


if __name__ == "__main__":
    sys.exit(main())
