"""Axis-aligned boxes in top-left/width/height pixel form, and overlap measures."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import InputContractError


@dataclass(frozen=True)
class BoundingBox:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.w, self.h)):
            raise InputContractError(f"non-finite box {self!r}")
        if self.w < 0 or self.h < 0:
            raise InputContractError(f"negative extent in {self!r}")

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def translated(self, dx: float, dy: float) -> BoundingBox:
        return BoundingBox(self.x + dx, self.y + dy, self.w, self.h)

    def as_xyxy(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.x + self.w, self.y + self.h)

    @classmethod
    def from_xyxy(cls, x1: float, y1: float, x2: float, y2: float) -> BoundingBox:
        return cls(x1, y1, x2 - x1, y2 - y1)


def _overlap_1d(a0: float, aw: float, b0: float, bw: float) -> float:
    a1, b1 = a0 + aw, b0 + bw
    # containment uses the inner extent directly so iou(a, a) is exactly 1
    if a0 >= b0 and a1 <= b1:
        return aw
    if b0 >= a0 and b1 <= a1:
        return bw
    return min(a1, b1) - max(a0, b0)


def _span_1d(a0: float, aw: float, b0: float, bw: float) -> float:
    a1, b1 = a0 + aw, b0 + bw
    if a0 >= b0 and a1 <= b1:
        return bw
    if b0 >= a0 and b1 <= a1:
        return aw
    return max(a1, b1) - min(a0, b0)


def _intersection(a: BoundingBox, b: BoundingBox) -> float:
    iw = _overlap_1d(a.x, a.w, b.x, b.w)
    ih = _overlap_1d(a.y, a.h, b.y, b.h)
    if iw <= 0 or ih <= 0:
        return 0.0
    return iw * ih


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; 0 when the union is empty."""
    inter = _intersection(a, b)
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    # clamp guards the last ulp for near-identical boxes
    return min(1.0, inter / union)


def giou(a: BoundingBox, b: BoundingBox) -> float:
    """Generalized IOU: IOU minus the empty fraction of the smallest enclosing box.

    Degenerate inputs whose enclosing box has zero area return 0.
    """
    inter = _intersection(a, b)
    union = a.area + b.area - inter
    enclosing = _span_1d(a.x, a.w, b.x, b.w) * _span_1d(a.y, a.h, b.y, b.h)
    if union <= 0 or enclosing <= 0:
        return 0.0
    overlap = min(1.0, inter / union)
    # union never exceeds the enclosing area; the clamp absorbs rounding
    return overlap - max(0.0, enclosing - union) / enclosing


def _overlap_1d_array(a0, aw, b0, bw):
    a1, b1 = a0 + aw, b0 + bw
    general = np.minimum(a1, b1) - np.maximum(a0, b0)
    a_inside = (a0 >= b0) & (a1 <= b1)
    b_inside = (b0 >= a0) & (b1 <= a1)
    return np.where(a_inside, aw, np.where(b_inside, bw, general))


def iou_matrix(a: Sequence[BoundingBox], b: Sequence[BoundingBox]) -> np.ndarray:
    """Pairwise IOU, shape (len(a), len(b)); elementwise identical to ``iou``."""
    if not a or not b:
        return np.zeros((len(a), len(b)))
    A = np.array([(q.x, q.y, q.w, q.h) for q in a], dtype=float)
    B = np.array([(q.x, q.y, q.w, q.h) for q in b], dtype=float)
    ax, ay, aw, ah = (A[:, k, None] for k in range(4))
    bx, by, bw, bh = (B[None, :, k] for k in range(4))
    iw = _overlap_1d_array(ax, aw, bx, bw)
    ih = _overlap_1d_array(ay, ah, by, bh)
    inter = np.where((iw > 0) & (ih > 0), iw * ih, 0.0)
    union = aw * ah + bw * bh - inter
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(union > 0, inter / union, 0.0)
    return np.minimum(out, 1.0)
