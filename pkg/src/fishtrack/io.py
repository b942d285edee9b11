"""MOT text format, scene config files and evaluation reports.

MOT lines are ``frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z``.
Detections use id -1. Numbers are written with the fewest digits that
round-trip exactly (integers without a decimal point).
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import TextIO

from .errors import MotParseError
from .geometry import BoundingBox
from .metrics import EvalCounts, EvalReport, Trajectory
from .simulator import SceneConfig, SceneOutput

MOT_FIELDS = 10
REPORT_FORMAT = "fishtrack-report/1"


@dataclass(frozen=True)
class MotRecord:
    frame: int
    id: int
    bb_left: float
    bb_top: float
    bb_width: float
    bb_height: float
    conf: float = 1.0
    x: float = -1.0
    y: float = -1.0
    z: float = -1.0

    @property
    def box(self) -> BoundingBox:
        return BoundingBox(self.bb_left, self.bb_top, self.bb_width, self.bb_height)


def _parse_int(tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        v = float(tok)
        if not v.is_integer():
            raise
        return int(v)


def _parse_line(lineno: int, line: str) -> MotRecord:
    toks = [t.strip() for t in line.split(",")]
    if len(toks) != MOT_FIELDS:
        raise MotParseError(lineno, line, f"expected {MOT_FIELDS} fields, got {len(toks)}")
    try:
        frame = _parse_int(toks[0])
        ident = _parse_int(toks[1])
        vals = [float(t) for t in toks[2:]]
    except ValueError as exc:
        raise MotParseError(lineno, line, "non-numeric field") from exc
    if not all(math.isfinite(v) for v in vals):
        raise MotParseError(lineno, line, "non-finite value")
    if frame < 1:
        raise MotParseError(lineno, line, "frame must be >= 1")
    if vals[2] < 0 or vals[3] < 0:
        raise MotParseError(lineno, line, "negative box extent")
    return MotRecord(frame, ident, *vals)


def read_mot(stream: TextIO | Iterable[str]) -> list[MotRecord]:
    """Parse MOT lines in input order; blank lines are skipped."""
    records = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        records.append(_parse_line(lineno, line))
    return records


def format_number(v: float) -> str:
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def write_mot(records: Iterable[MotRecord], stream: TextIO | None = None) -> str:
    """Serialise records sorted by (frame, id); also write to ``stream`` if given."""
    rows = sorted(records, key=lambda r: (r.frame, r.id))
    text = "".join(
        ",".join(
            [str(r.frame), str(r.id)]
            + [format_number(v) for v in (r.bb_left, r.bb_top, r.bb_width, r.bb_height, r.conf, r.x, r.y, r.z)]
        )
        + "\n"
        for r in rows
    )
    if stream is not None:
        stream.write(text)
    return text


def trajectories_from_records(records: Iterable[MotRecord], min_conf: float | None = None) -> list[Trajectory]:
    """Group records by id. Records with ``conf <= min_conf`` are skipped when
    ``min_conf`` is given."""
    by_id: dict[int, Trajectory] = {}
    for r in records:
        if min_conf is not None and r.conf <= min_conf:
            continue
        by_id.setdefault(r.id, Trajectory(r.id)).add(r.frame, r.box)
    return [by_id[k] for k in sorted(by_id)]


def records_from_trajectories(trajs: Iterable[Trajectory], conf: float = 1.0) -> list[MotRecord]:
    return [
        MotRecord(f, t.identity, b.x, b.y, b.w, b.h, conf)
        for t in trajs
        for f, b in sorted(t.boxes.items())
    ]


def detections_from_records(records: Iterable[MotRecord]) -> dict[int, list[tuple[BoundingBox, float]]]:
    """Per-frame (box, confidence) lists in file order; ids are ignored."""
    out: dict[int, list[tuple[BoundingBox, float]]] = {}
    for r in records:
        out.setdefault(r.frame, []).append((r.box, r.conf))
    return out


def records_from_detections(detections: dict[int, Sequence[tuple[BoundingBox, float]]]) -> list[MotRecord]:
    return [
        MotRecord(f, -1, b.x, b.y, b.w, b.h, c)
        for f in sorted(detections)
        for b, c in detections[f]
    ]


def scene_records(scene: SceneOutput) -> tuple[list[MotRecord], list[MotRecord]]:
    """(ground truth records, detection records) for a simulated scene."""
    return records_from_trajectories(scene.gt), records_from_detections(scene.detections)


def load_scene_config(stream: TextIO, **overrides) -> SceneConfig:
    data = json.load(stream)
    if not isinstance(data, dict):
        raise ValueError("scene config must be a JSON object")
    data.update({k: v for k, v in overrides.items() if v is not None})
    return SceneConfig.from_dict(data)


def dump_scene_config(config: SceneConfig) -> str:
    return json.dumps(config.to_dict(), indent=2) + "\n"


def counts_to_dict(c: EvalCounts) -> dict:
    return {
        "FN": c.fn,
        "FP": c.fp,
        "switches": c.switches,
        "T": c.num_gt,
        "num_pred": c.num_pred,
        "match_count": c.match_count,
        "match_distances": list(c.match_distances),
        "IDTP": c.idtp,
        "IDFP": c.idfp,
        "IDFN": c.idfn,
    }


def counts_from_dict(d: dict) -> EvalCounts:
    counts = EvalCounts(
        fn=int(d["FN"]),
        fp=int(d["FP"]),
        switches=int(d["switches"]),
        num_gt=int(d["T"]),
        num_pred=int(d.get("num_pred", 0)),
        match_distances=[float(v) for v in d["match_distances"]],
        idtp=int(d["IDTP"]),
        idfp=int(d["IDFP"]),
        idfn=int(d["IDFN"]),
    )
    if "match_count" in d and int(d["match_count"]) != counts.match_count:
        raise ValueError("match_count disagrees with match_distances")
    return counts


def report_to_dict(report: EvalReport, **meta) -> dict:
    out = {
        "format": REPORT_FORMAT,
        "mota": report.mota,
        "motp": report.motp,
        "motp_mode": report.motp_mode,
        "idf1": report.idf1,
        "idp": report.idp,
        "idr": report.idr,
        "undefined": list(report.undefined),
        "counts": counts_to_dict(report.counts),
    }
    if meta:
        out["meta"] = dict(meta)
    return out


def dumps_report(report: EvalReport, **meta) -> str:
    return json.dumps(report_to_dict(report, **meta), indent=2) + "\n"


def report_from_dict(d: dict) -> EvalReport:
    if d.get("format") != REPORT_FORMAT:
        raise ValueError(f"not a {REPORT_FORMAT} document")
    return EvalReport(
        mota=float(d["mota"]),
        motp=float(d["motp"]),
        idf1=float(d["idf1"]),
        idp=float(d["idp"]),
        idr=float(d["idr"]),
        counts=counts_from_dict(d["counts"]),
        motp_mode=d.get("motp_mode", "distance"),
        undefined=list(d.get("undefined", [])),
    )
