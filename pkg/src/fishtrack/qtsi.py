"""Query time-sequence intersection: pick, per ground-truth box, the best
overlapping detect or track query and carry it over as a track query.

Competition is one-to-one. Every (real box, query) pair whose IOU exceeds the
threshold is a candidate; candidates are consumed greedily in descending IOU
order, skipping boxes and queries already taken. Detect queries win ties
(IOU within ``tie_margin`` of a track query).
"""

from __future__ import annotations

import dataclasses
import enum
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from .errors import ConfigError, InputContractError
from .geometry import BoundingBox, iou


class QueryKind(enum.Enum):
    DETECT = "detect"
    TRACK = "track"


class DecisionSource(enum.Enum):
    FROM_DETECT = "FromDetect"
    FROM_TRACK = "FromTrack"
    UNMATCHED = "Unmatched"


@dataclass(frozen=True, eq=False)
class Query:
    """An object hypothesis. Equality is by reference: two queries with the
    same box are still different hypotheses."""

    kind: QueryKind
    box: BoundingBox
    identity: int | None = None
    confidence: float = 1.0
    payload: Any = None

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise InputContractError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class QtsiConfig:
    iou_threshold: float = 0.5
    tie_margin: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.iou_threshold <= 1.0:
            raise ConfigError(f"iou_threshold {self.iou_threshold} outside [0, 1]")
        if not self.tie_margin >= 0.0:
            raise ConfigError(f"tie_margin {self.tie_margin} must be non-negative")


@dataclass(frozen=True)
class QtsiDecision:
    real_index: int
    source: DecisionSource
    iou: float
    winner_index: int | None = None  # index into the detect or track list, per source
    best_detect_iou: float = 0.0
    best_track_iou: float = 0.0
    inherited_identity: int | None = None


def _validate(detect_queries: Sequence[Query], track_queries: Sequence[Query]) -> None:
    for i, q in enumerate(detect_queries):
        if q.kind is not QueryKind.DETECT:
            raise InputContractError(f"detect_queries[{i}] has kind {q.kind.value}")
    for i, q in enumerate(track_queries):
        if q.kind is not QueryKind.TRACK:
            raise InputContractError(f"track_queries[{i}] has kind {q.kind.value}")
        if q.identity is None:
            raise InputContractError(f"track_queries[{i}] has no identity")


def candidate_pairs(
    detect_queries: Sequence[Query],
    track_queries: Sequence[Query],
    real_boxes: Sequence[BoundingBox],
    config: QtsiConfig,
) -> list[tuple[float, float, int, int, QueryKind, int]]:
    """All above-threshold (real box, query) pairs in competition order.

    Tuples are (ordering score, iou, kind rank, real index, kind, query index);
    sorting them ascending after negating the score gives the greedy order.
    """
    out = []
    for g, real in enumerate(real_boxes):
        for k, q in enumerate(detect_queries):
            v = iou(real, q.box)
            if v > config.iou_threshold:
                out.append((v + config.tie_margin, v, 0, g, QueryKind.DETECT, k))
        for k, q in enumerate(track_queries):
            v = iou(real, q.box)
            if v > config.iou_threshold:
                out.append((v, v, 1, g, QueryKind.TRACK, k))
    # score desc; then detect before track; then lowest real index, lowest query index
    out.sort(key=lambda t: (-t[0], t[2], t[3], t[5]))
    return out


def qtsi_merge(
    detect_queries: Sequence[Query],
    track_queries: Sequence[Query],
    real_boxes: Sequence[BoundingBox],
    new_match_queries: Sequence[Query] = (),
    config: QtsiConfig | None = None,
) -> tuple[list[Query], list[QtsiDecision]]:
    """Merge detect and track queries against one frame's real boxes.

    Returns the carried-over track-query set (selected queries followed by
    ``new_match_queries``, each input query at most once) and one decision
    per real box.

    A detect query that wins a real box inherits the identity of the best
    above-threshold track query on that same box, provided that track query
    won nothing itself and no other detect query already inherited it.
    """
    config = config or QtsiConfig()
    _validate(detect_queries, track_queries)

    pools = {QueryKind.DETECT: detect_queries, QueryKind.TRACK: track_queries}
    taken_real: dict[int, tuple[QueryKind, int, float]] = {}
    taken_query: set[tuple[QueryKind, int]] = set()
    for _, v, _, g, kind, k in candidate_pairs(detect_queries, track_queries, real_boxes, config):
        if g in taken_real or (kind, k) in taken_query:
            continue
        taken_real[g] = (kind, k, v)
        taken_query.add((kind, k))

    best_det = [max((iou(r, q.box) for q in detect_queries), default=0.0) for r in real_boxes]
    best_tr = [max((iou(r, q.box) for q in track_queries), default=0.0) for r in real_boxes]

    inherited: dict[int, int] = {}
    claimed_tracks: set[int] = set()
    for g in sorted(taken_real):
        kind, k, _ = taken_real[g]
        if kind is not QueryKind.DETECT:
            continue
        best = None
        for t, tq in enumerate(track_queries):
            if (QueryKind.TRACK, t) in taken_query or t in claimed_tracks:
                continue
            v = iou(real_boxes[g], tq.box)
            if v > config.iou_threshold and (best is None or v > best[0]):
                best = (v, t)
        if best is not None:
            claimed_tracks.add(best[1])
            inherited[g] = track_queries[best[1]].identity

    decisions: list[QtsiDecision] = []
    merged: list[Query] = []
    seen: set[int] = set()
    for g in range(len(real_boxes)):
        if g not in taken_real:
            decisions.append(
                QtsiDecision(g, DecisionSource.UNMATCHED, max(best_det[g], best_tr[g]), None, best_det[g], best_tr[g])
            )
            continue
        kind, k, v = taken_real[g]
        src = DecisionSource.FROM_DETECT if kind is QueryKind.DETECT else DecisionSource.FROM_TRACK
        decisions.append(QtsiDecision(g, src, v, k, best_det[g], best_tr[g], inherited.get(g)))
        q = pools[kind][k]
        seen.add(id(q))
        if g in inherited:
            q = dataclasses.replace(q, identity=inherited[g])
        merged.append(q)

    for q in new_match_queries:
        if id(q) not in seen:
            seen.add(id(q))
            merged.append(q)
    return merged, decisions


def format_decisions(decisions: Sequence[QtsiDecision], frame: int | None = None) -> list[str]:
    """One ``key=value`` line per decision, for trace logs."""
    lines = []
    for d in decisions:
        parts = [] if frame is None else [f"frame={frame}"]
        parts += [
            f"real={d.real_index}",
            f"source={d.source.value}",
            f"iou={d.iou:.6f}",
            f"winner={'-' if d.winner_index is None else d.winner_index}",
            f"best_detect={d.best_detect_iou:.6f}",
            f"best_track={d.best_track_iou:.6f}",
            f"inherited={'-' if d.inherited_identity is None else d.inherited_identity}",
        ]
        lines.append(" ".join(parts))
    return lines
