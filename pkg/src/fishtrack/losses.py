"""Detection/tracking loss diagnostics: focal classification loss, normalised
L1 box loss, GIOU loss, and the sequence-level average over ground truths.

No gradients here; these are evaluated on already-matched pairs.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .errors import ConfigError, InputContractError, UndefinedMetricError
from .geometry import BoundingBox, giou

PROB_EPS = 1e-7


@dataclass(frozen=True)
class LossWeights:
    lambda_cls: float = 2.0
    lambda_l1: float = 5.0
    lambda_giou: float = 2.0

    def __post_init__(self):
        for name in ("lambda_cls", "lambda_l1", "lambda_giou"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")

    def scaled(self, c: float) -> LossWeights:
        return LossWeights(self.lambda_cls * c, self.lambda_l1 * c, self.lambda_giou * c)


@dataclass(frozen=True)
class FrameLossStats:
    track_loss: float
    detect_loss: float
    v_track: int
    v_detect: int

    def __post_init__(self):
        if self.v_track < 0 or self.v_detect < 0:
            raise InputContractError("ground-truth counts must be non-negative")

    @property
    def v_total(self) -> int:
        return self.v_track + self.v_detect


@dataclass(frozen=True)
class MatchedPair:
    pred: BoundingBox
    prob: float
    gt: BoundingBox


def focal_loss(predicted_prob: float, is_positive: bool, alpha: float = 0.25, gamma: float = 2.0) -> float:
    p = min(max(predicted_prob, PROB_EPS), 1.0 - PROB_EPS)
    if is_positive:
        return -alpha * (1.0 - p) ** gamma * math.log(p)
    return -(1.0 - alpha) * p**gamma * math.log(1.0 - p)


def l1_normalized(pred: BoundingBox, gt: BoundingBox, image_size: tuple[float, float]) -> float:
    """Mean absolute difference over (x, y, w, h), scaled by image width/height."""
    width, height = image_size
    return (
        abs(pred.x - gt.x) / width
        + abs(pred.y - gt.y) / height
        + abs(pred.w - gt.w) / width
        + abs(pred.h - gt.h) / height
    ) / 4.0


def frame_loss(
    matched_pairs: Sequence[MatchedPair | tuple[BoundingBox, float, BoundingBox]],
    weights: LossWeights | None = None,
    image_size: tuple[float, float] = (1920.0, 1080.0),
    alpha: float = 0.25,
    gamma: float = 2.0,
) -> float:
    """Weighted single-frame loss over matched (prediction, ground truth) pairs.

    Returns 0 for an empty pair list.
    """
    weights = weights or LossWeights()
    if not matched_pairs:
        return 0.0
    pairs = [p if isinstance(p, MatchedPair) else MatchedPair(*p) for p in matched_pairs]
    n = len(pairs)
    cls = sum(focal_loss(p.prob, True, alpha, gamma) for p in pairs) / n
    l1 = sum(l1_normalized(p.pred, p.gt, image_size) for p in pairs) / n
    g = sum(1.0 - giou(p.pred, p.gt) for p in pairs) / n
    return weights.lambda_cls * cls + weights.lambda_l1 * l1 + weights.lambda_giou * g


def joint_average_loss(frames: Iterable[FrameLossStats]) -> float:
    """Sum of per-frame track and detect losses divided by total ground truths."""
    frames = list(frames)
    count = sum(f.v_total for f in frames)
    if count == 0:
        raise UndefinedMetricError("no ground truths across frames; joint average undefined")
    # fsum keeps the result independent of frame order
    total = math.fsum(x for f in frames for x in (f.track_loss, f.detect_loss))
    return total / count
