"""``fishtrack`` command line: simulate, track, eval, qtsi-trace, report.

Exit status is 0 on success, 1 on usage errors, 2 on data errors (missing or
malformed input files, invalid configuration values).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from collections.abc import Sequence
from functools import reduce

from . import __version__
from .errors import FishtrackError
from .io import (
    MotRecord,
    detections_from_records,
    dumps_report,
    load_scene_config,
    read_mot,
    report_from_dict,
    report_to_dict,
    scene_records,
    trajectories_from_records,
    write_mot,
)
from .metrics import evaluate, report_from_counts
from .qtsi import QtsiConfig, Query, QueryKind, format_decisions, qtsi_merge
from .simulator import SceneConfig, simulate
from .tracker import Tracker, TrackerConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class _Formatter(argparse.ArgumentDefaultsHelpFormatter):
    pass


def _open_in(path: str, flag: str):
    if path == "-":
        return contextlib.nullcontext(sys.stdin)
    try:
        return open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{flag}: cannot read {path!r}: {exc.strerror}") from exc


def _open_out(path: str, flag: str):
    if path == "-":
        return contextlib.nullcontext(sys.stdout)
    try:
        return open(path, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise DataError(f"{flag}: cannot write {path!r}: {exc.strerror}") from exc


def _read_records(path: str, flag: str) -> list[MotRecord]:
    with _open_in(path, flag) as fh:
        try:
            return read_mot(fh)
        except ValueError as exc:
            raise DataError(f"{flag} {path}: {exc}") from exc


def cmd_simulate(args) -> int:
    if args.config:
        with _open_in(args.config, "--config") as fh:
            try:
                config = load_scene_config(fh, seed=args.seed)
            except (ValueError, TypeError) as exc:
                raise DataError(f"--config {args.config}: {exc}") from exc
    else:
        config = SceneConfig(seed=args.seed if args.seed is not None else 0)
    scene = simulate(config)
    gt_recs, det_recs = scene_records(scene)
    with _open_out(args.out_gt, "--out-gt") as fh:
        write_mot(gt_recs, fh)
    with _open_out(args.out_det, "--out-det") as fh:
        write_mot(det_recs, fh)
    if args.out_events:
        with _open_out(args.out_events, "--out-events") as fh:
            for e in scene.events:
                box = "-" if e.box is None else ",".join(str(v) for v in (e.box.x, e.box.y, e.box.w, e.box.h))
                fh.write(
                    f"frame={e.frame} kind={e.kind} fish={'-' if e.fish is None else e.fish} "
                    f"other={'-' if e.other is None else e.other} box={box} "
                    f"conf={'-' if e.confidence is None else repr(e.confidence)}\n"
                )
    return EXIT_OK


def cmd_track(args) -> int:
    config = TrackerConfig(args.iou_thresh, args.miss_tolerance, args.min_conf)
    per_frame = detections_from_records(_read_records(args.det, "--det"))
    last = args.last_frame or max(per_frame, default=0)
    tracker = Tracker(config)
    out = []
    for f in range(1, last + 1):
        for o in tracker.step(per_frame.get(f, []), f):
            if o.coasting and not args.emit_coasting:
                continue
            # coasting rows carry confidence 0, the MOT convention for "ignore"
            conf = 0.0 if o.coasting else o.confidence
            out.append(MotRecord(f, o.identity, o.box.x, o.box.y, o.box.w, o.box.h, conf))
    with _open_out(args.out, "--out") as fh:
        write_mot(out, fh)
    return EXIT_OK


def cmd_eval(args) -> int:
    gt = trajectories_from_records(_read_records(args.gt, "--gt"))
    pred_recs = _read_records(args.pred, "--pred")
    pred = trajectories_from_records(pred_recs, min_conf=None if args.include_coasting else 0.0)
    report = evaluate(gt, pred, args.iou_thresh, args.motp_mode)
    with _open_out(args.report, "--report") as fh:
        fh.write(dumps_report(report, gt=args.gt, pred=args.pred, iou_threshold=args.iou_thresh))
    return EXIT_OK


def _queries(records: Sequence[MotRecord], kind: QueryKind) -> dict[int, list[Query]]:
    out: dict[int, list[Query]] = {}
    for r in records:
        ident = None if r.id < 0 else r.id
        conf = min(max(r.conf, 0.0), 1.0)
        out.setdefault(r.frame, []).append(Query(kind, r.box, ident, conf))
    return out


def cmd_qtsi_trace(args) -> int:
    config = QtsiConfig(args.phi, args.tie_margin)
    det = _queries(_read_records(args.det, "--det"), QueryKind.DETECT)
    track_recs = _read_records(args.track, "--track")
    for r in track_recs:
        if r.id < 0:
            raise DataError(f"--track {args.track}: frame {r.frame} has a track query without identity")
    track = _queries(track_recs, QueryKind.TRACK)
    new = _queries(_read_records(args.new, "--new"), QueryKind.TRACK) if args.new else {}
    gt: dict[int, list] = {}
    for r in _read_records(args.gt, "--gt"):
        gt.setdefault(r.frame, []).append(r.box)
    with _open_out(args.out, "--out") as fh:
        for f in sorted(set(det) | set(track) | set(gt) | set(new)):
            merged, decisions = qtsi_merge(det.get(f, []), track.get(f, []), gt.get(f, []), new.get(f, []), config)
            for line in format_decisions(decisions, frame=f):
                fh.write(line + "\n")
            ids = ",".join("-" if q.identity is None else str(q.identity) for q in merged)
            fh.write(f"frame={f} merged={len(merged)} identities={ids or '-'}\n")
    return EXIT_OK


def cmd_report(args) -> int:
    reports = []
    for path in args.inputs:
        with _open_in(path, "--in") as fh:
            try:
                reports.append(report_from_dict(json.load(fh)))
            except (ValueError, KeyError, TypeError) as exc:
                raise DataError(f"--in {path}: {exc}") from exc
    total = reduce(lambda a, b: a + b, (r.counts for r in reports))
    summary = report_from_counts(total, args.motp_mode)
    doc = report_to_dict(summary, sequences=len(reports), inputs=list(args.inputs))
    with _open_out(args.out, "--out") as fh:
        fh.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fishtrack", description=__doc__.splitlines()[0], formatter_class=_Formatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("simulate", help="generate a synthetic scene", formatter_class=_Formatter)
    p.add_argument("--config", default=None, help="JSON scene config (built-in defaults when omitted)")
    p.add_argument("--out-gt", default="gt.txt", help="ground-truth MOT file")
    p.add_argument("--out-det", default="det.txt", help="detections MOT file")
    p.add_argument("--out-events", default=None, help="optional corruption event log")
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed (config value, else 0)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("track", help="run the tracker over a detections file", formatter_class=_Formatter)
    p.add_argument("--det", required=True, help="detections MOT file (required)")
    p.add_argument("--out", default="tracks.txt", help="tracker output MOT file")
    p.add_argument("--iou-thresh", type=float, default=0.5, help="association IOU threshold")
    p.add_argument("--miss-tolerance", type=int, default=100, help="frames a track may coast before retirement")
    p.add_argument("--min-conf", type=float, default=0.1, help="drop detections below this confidence")
    p.add_argument("--emit-coasting", action="store_true", default=False, help="also write coasting tracks (conf 0)")
    p.add_argument("--last-frame", type=int, default=None, help="last frame to process (last frame in --det)")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="score tracker output against ground truth", formatter_class=_Formatter)
    p.add_argument("--gt", required=True, help="ground-truth MOT file (required)")
    p.add_argument("--pred", required=True, help="tracker output MOT file (required)")
    p.add_argument("--iou-thresh", type=float, default=0.5, help="matching IOU threshold")
    p.add_argument("--report", default="-", help="report file, '-' for stdout")
    p.add_argument("--include-coasting", action="store_true", default=False, help="keep conf<=0 prediction rows")
    p.add_argument("--motp-mode", choices=("distance", "overlap"), default="distance", help="MOTP as 1-IOU or as IOU")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("qtsi-trace", help="log per-box query merge decisions", formatter_class=_Formatter)
    p.add_argument("--det", required=True, help="detect-query MOT file (required)")
    p.add_argument("--track", required=True, help="track-query MOT file with identities (required)")
    p.add_argument("--gt", required=True, help="real-box MOT file (required)")
    p.add_argument("--new", default=None, help="optional MOT file of newly matched queries")
    p.add_argument("--phi", type=float, default=0.5, help="IOU threshold a winner must exceed")
    p.add_argument("--tie-margin", type=float, default=0.0, help="detect wins if within this IOU of a track")
    p.add_argument("--out", default="-", help="decision log, '-' for stdout")
    p.set_defaults(func=cmd_qtsi_trace)

    p = sub.add_parser("report", help="aggregate eval reports across sequences", formatter_class=_Formatter)
    p.add_argument("--in", dest="inputs", nargs="+", required=True, help="eval report files (required)")
    p.add_argument("--out", default="-", help="summary file, '-' for stdout")
    p.add_argument("--motp-mode", choices=("distance", "overlap"), default="distance", help="MOTP as 1-IOU or as IOU")
    p.set_defaults(func=cmd_report)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except DataError as exc:
        print(f"fishtrack {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FishtrackError as exc:
        print(f"fishtrack {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
