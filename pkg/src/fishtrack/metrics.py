"""CLEAR-MOT (MOTA, MOTP) and identity (IDF1, IDP, IDR) evaluation."""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .assignment import FORBIDDEN, solve_min_cost
from .errors import InputContractError, UndefinedMetricError
from .geometry import BoundingBox, iou, iou_matrix


@dataclass
class Trajectory:
    identity: int
    boxes: dict[int, BoundingBox] = field(default_factory=dict)

    def add(self, frame: int, box: BoundingBox) -> None:
        if frame in self.boxes:
            raise InputContractError(f"identity {self.identity} has two boxes in frame {frame}")
        self.boxes[frame] = box

    def __len__(self) -> int:
        return len(self.boxes)


@dataclass
class EvalCounts:
    fn: int = 0
    fp: int = 0
    switches: int = 0
    num_gt: int = 0  # T
    num_pred: int = 0
    match_distances: list[float] = field(default_factory=list)
    idtp: int = 0
    idfp: int = 0
    idfn: int = 0

    @property
    def match_count(self) -> int:
        return len(self.match_distances)

    def __add__(self, other: EvalCounts) -> EvalCounts:
        return EvalCounts(
            fn=self.fn + other.fn,
            fp=self.fp + other.fp,
            switches=self.switches + other.switches,
            num_gt=self.num_gt + other.num_gt,
            num_pred=self.num_pred + other.num_pred,
            match_distances=self.match_distances + other.match_distances,
            idtp=self.idtp + other.idtp,
            idfp=self.idfp + other.idfp,
            idfn=self.idfn + other.idfn,
        )


@dataclass
class EvalReport:
    mota: float
    motp: float
    idf1: float
    idp: float
    idr: float
    counts: EvalCounts
    motp_mode: str = "distance"
    undefined: list[str] = field(default_factory=list)


def _by_frame(trajs: Iterable[Trajectory]) -> dict[int, list[tuple[int, BoundingBox]]]:
    frames: dict[int, list[tuple[int, BoundingBox]]] = defaultdict(list)
    seen = set()
    for t in trajs:
        if t.identity in seen:
            raise InputContractError(f"duplicate trajectory identity {t.identity}")
        seen.add(t.identity)
        for f, b in t.boxes.items():
            frames[f].append((t.identity, b))
    for items in frames.values():
        items.sort(key=lambda x: x[0])
    return frames


def clear_mot(gt: Sequence[Trajectory], pred: Sequence[Trajectory], iou_threshold: float = 0.5) -> EvalCounts:
    """Per-frame CLEAR-MOT matching with correspondence carry-forward.

    Correspondences from the previous frame are kept while their IOU stays
    above the threshold; the rest is matched optimally on ``1 - IOU``.
    """
    gt_frames = _by_frame(gt)
    pred_frames = _by_frame(pred)
    counts = EvalCounts()
    prev: dict[int, int] = {}  # gt id -> pred id, previous frame only
    last: dict[int, int] = {}  # gt id -> most recent pred id, any frame
    for f in sorted(set(gt_frames) | set(pred_frames)):
        g_items = gt_frames.get(f, [])
        p_items = pred_frames.get(f, [])
        counts.num_gt += len(g_items)
        counts.num_pred += len(p_items)
        p_index = {pid: k for k, (pid, _) in enumerate(p_items)}

        current: dict[int, int] = {}
        dist: dict[int, float] = {}
        used_g: set[int] = set()
        used_p: set[int] = set()
        for gi, (gid, gbox) in enumerate(g_items):
            pid = prev.get(gid)
            if pid is None or pid not in p_index:
                continue
            pk = p_index[pid]
            v = iou(gbox, p_items[pk][1])
            if v > iou_threshold:
                current[gid] = pid
                dist[gid] = 1.0 - v
                used_g.add(gi)
                used_p.add(pk)

        rest_g = [gi for gi in range(len(g_items)) if gi not in used_g]
        rest_p = [pk for pk in range(len(p_items)) if pk not in used_p]
        overlap = iou_matrix([g_items[gi][1] for gi in rest_g], [p_items[pk][1] for pk in rest_p])
        costs = [[1.0 - v if v > iou_threshold else FORBIDDEN for v in row] for row in overlap.tolist()]
        for r, c in solve_min_cost(costs, len(rest_g), len(rest_p)).pairs:
            gid = g_items[rest_g[r]][0]
            current[gid] = p_items[rest_p[c]][0]
            dist[gid] = costs[r][c]

        for gid, pid in current.items():
            if gid in last and last[gid] != pid:
                counts.switches += 1
            last[gid] = pid
        for gid, _ in g_items:
            if gid in dist:
                counts.match_distances.append(dist[gid])
        counts.fn += len(g_items) - len(current)
        counts.fp += len(p_items) - len(current)
        prev = current
    return counts


def mota(counts: EvalCounts) -> float:
    if counts.num_gt == 0:
        raise UndefinedMetricError("MOTA undefined without ground truth")
    return 1.0 - (counts.fn + counts.fp + counts.switches) / counts.num_gt


def motp(counts: EvalCounts, mode: str = "distance") -> float:
    """Mean matched ``1 - IOU`` (``mode='distance'``, lower is better) or mean
    matched IOU (``mode='overlap'``)."""
    if counts.match_count == 0:
        raise UndefinedMetricError("MOTP undefined without matches")
    d = math.fsum(counts.match_distances) / counts.match_count
    if mode == "distance":
        return d
    if mode == "overlap":
        return 1.0 - d
    raise ValueError(f"unknown MOTP mode {mode!r}")


@dataclass(frozen=True)
class IdScores:
    idf1: float
    idp: float
    idr: float
    idtp: int
    idfp: int
    idfn: int
    idp_defined: bool = True
    idr_defined: bool = True


def colocation_counts(
    gt: Sequence[Trajectory], pred: Sequence[Trajectory], iou_threshold: float
) -> dict[tuple[int, int], int]:
    """Frames in which each (gt identity, pred identity) pair overlaps above threshold."""
    gt_frames = _by_frame(gt)
    pred_frames = _by_frame(pred)
    together: dict[tuple[int, int], int] = defaultdict(int)
    for f, g_items in gt_frames.items():
        p_items = pred_frames.get(f)
        if not p_items:
            continue
        overlap = iou_matrix([b for _, b in g_items], [b for _, b in p_items])
        for gi, pk in zip(*np.nonzero(overlap > iou_threshold)):
            together[(g_items[gi][0], p_items[pk][0])] += 1
    return together


def id_metrics(gt: Sequence[Trajectory], pred: Sequence[Trajectory], iou_threshold: float = 0.5) -> IdScores:
    """Identity precision/recall/F1 under the globally optimal identity pairing.

    Pairing gt identity g with pred identity p costs the frames where they do
    not co-locate (g's unmatched boxes plus p's unmatched boxes). Each
    identity may stay unpaired through a dummy node at cost equal to its box
    count.
    """
    n_gt_boxes = sum(len(t) for t in gt)
    n_pred_boxes = sum(len(t) for t in pred)
    if n_gt_boxes == 0 and n_pred_boxes == 0:
        raise UndefinedMetricError("identity metrics undefined for two empty sets")

    together = colocation_counts(gt, pred, iou_threshold)
    ng, np_ = len(gt), len(pred)
    gt_pos = {t.identity: i for i, t in enumerate(gt)}
    pred_pos = {t.identity: j for j, t in enumerate(pred)}
    n = ng + np_
    costs = [[FORBIDDEN] * n for _ in range(n)]
    for i, t in enumerate(gt):
        costs[i][np_ + i] = len(t)
    for j, t in enumerate(pred):
        costs[ng + j][j] = len(t)
    for (gid, pid), m in together.items():
        i, j = gt_pos[gid], pred_pos[pid]
        costs[i][j] = len(gt[i]) + len(pred[j]) - 2 * m
        # mirrored dummy-to-dummy edge keeps the completion feasible
        costs[ng + j][np_ + i] = 0
    matching = solve_min_cost(costs, n, n)

    idtp = 0
    for r, c in matching.pairs:
        if r < ng and c < np_:
            idtp += together[(gt[r].identity, pred[c].identity)]
    idfp = n_pred_boxes - idtp
    idfn = n_gt_boxes - idtp
    idp_defined = idtp + idfp > 0
    idr_defined = idtp + idfn > 0
    idp = idtp / (idtp + idfp) if idp_defined else 0.0
    idr = idtp / (idtp + idfn) if idr_defined else 0.0
    idf1 = 2 * idtp / (2 * idtp + idfp + idfn)
    return IdScores(idf1, idp, idr, idtp, idfp, idfn, idp_defined, idr_defined)


def evaluate(
    gt: Sequence[Trajectory],
    pred: Sequence[Trajectory],
    iou_threshold: float = 0.5,
    motp_mode: str = "distance",
) -> EvalReport:
    """Full report for one sequence. Undefined metrics are reported as 0 and
    listed by name in ``undefined``."""
    counts = clear_mot(gt, pred, iou_threshold)
    if counts.num_gt or counts.num_pred:
        ids = id_metrics(gt, pred, iou_threshold)
        counts.idtp, counts.idfp, counts.idfn = ids.idtp, ids.idfp, ids.idfn
    return report_from_counts(counts, motp_mode)


def report_from_counts(counts: EvalCounts, motp_mode: str = "distance") -> EvalReport:
    """Recompute every metric from (possibly aggregated) counts."""
    undefined = []
    try:
        mota_v = mota(counts)
    except UndefinedMetricError:
        mota_v = 0.0
        undefined.append("mota")
    try:
        motp_v = motp(counts, motp_mode)
    except UndefinedMetricError:
        motp_v = 0.0
        undefined.append("motp")
    tp, fp, fn = counts.idtp, counts.idfp, counts.idfn
    if tp + fp > 0:
        idp = tp / (tp + fp)
    else:
        idp = 0.0
        undefined.append("idp")
    if tp + fn > 0:
        idr = tp / (tp + fn)
    else:
        idr = 0.0
        undefined.append("idr")
    if 2 * tp + fp + fn > 0:
        idf1 = 2 * tp / (2 * tp + fp + fn)
    else:
        idf1 = 0.0
        undefined.append("idf1")
    return EvalReport(mota_v, motp_v, idf1, idp, idr, counts, motp_mode, undefined)
