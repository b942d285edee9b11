"""Online IOU tracker with constant-velocity coasting and miss tolerance."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .assignment import FORBIDDEN, solve_min_cost
from .errors import ConfigError, SequenceError
from .geometry import BoundingBox, iou_matrix

VELOCITY_SMOOTHING = 0.5


@dataclass(frozen=True)
class TrackerConfig:
    iou_match_threshold: float = 0.5
    miss_tolerance: int = 100
    min_confidence: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.iou_match_threshold <= 1.0:
            raise ConfigError(f"iou_match_threshold {self.iou_match_threshold} outside [0, 1]")
        if self.miss_tolerance < 0:
            raise ConfigError(f"miss_tolerance {self.miss_tolerance} must be >= 0")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ConfigError(f"min_confidence {self.min_confidence} outside [0, 1]")


@dataclass
class TrackState:
    identity: int
    box: BoundingBox
    velocity: tuple[float, float] = (0.0, 0.0)
    miss_count: int = 0
    age: int = 1
    confidence: float = 1.0
    last_frame: int = 0
    last_box: BoundingBox | None = None  # last detection-confirmed box


@dataclass(frozen=True)
class TrackOutput:
    identity: int
    box: BoundingBox
    confidence: float
    coasting: bool = False


class Tracker:
    """Single-sequence tracker. Not thread-safe; use one instance per sequence."""

    def __init__(self, config: TrackerConfig | None = None):
        self.config = config or TrackerConfig()
        self.tracks: list[TrackState] = []
        self.next_identity = 1
        self.last_frame: int | None = None

    def step(self, detections: Sequence[tuple[BoundingBox, float]], frame_index: int) -> list[TrackOutput]:
        """Advance one frame and return matched tracks followed by coasting ones."""
        if self.last_frame is not None and frame_index <= self.last_frame:
            raise SequenceError(f"frame {frame_index} does not follow frame {self.last_frame}")
        self.last_frame = frame_index
        cfg = self.config
        dets = [(b, c) for b, c in detections if c >= cfg.min_confidence]

        for t in self.tracks:
            vx, vy = t.velocity
            t.box = t.box.translated(vx, vy)

        overlap = iou_matrix([t.box for t in self.tracks], [b for b, _ in dets])
        costs = [
            [1.0 - v if v > cfg.iou_match_threshold else FORBIDDEN for v in row]
            for row in overlap.tolist()
        ]
        matching = solve_min_cost(costs, len(self.tracks), len(dets))

        matched: list[TrackState] = []
        for r, c in matching.pairs:
            t = self.tracks[r]
            box, conf = dets[c]
            gap = frame_index - t.last_frame
            ref = t.last_box if t.last_box is not None else t.box
            mx = (box.x - ref.x) / gap
            my = (box.y - ref.y) / gap
            a = VELOCITY_SMOOTHING
            t.velocity = (a * t.velocity[0] + (1 - a) * mx, a * t.velocity[1] + (1 - a) * my)
            t.box = box
            t.last_box = box
            t.last_frame = frame_index
            t.confidence = conf
            t.miss_count = 0
            t.age += 1
            matched.append(t)

        coasting: list[TrackState] = []
        for r in matching.unmatched_rows:
            t = self.tracks[r]
            t.miss_count += 1
            t.age += 1
            if t.miss_count <= cfg.miss_tolerance:
                coasting.append(t)
        matched_ids = {id(t) for t in matched}
        coasting_ids = {id(t) for t in coasting}
        survivors = [t for t in self.tracks if id(t) in matched_ids or id(t) in coasting_ids]

        born: list[TrackState] = []
        for c in matching.unmatched_cols:
            box, conf = dets[c]
            t = TrackState(self.next_identity, box, confidence=conf, last_frame=frame_index, last_box=box)
            self.next_identity += 1
            born.append(t)
        self.tracks = survivors + born

        outputs = [TrackOutput(t.identity, t.box, t.confidence) for t in matched + born]
        outputs.sort(key=lambda o: o.identity)
        outputs += sorted(
            (TrackOutput(t.identity, t.box, t.confidence, coasting=True) for t in coasting),
            key=lambda o: o.identity,
        )
        return outputs


def track_sequence(
    frames: Iterable[tuple[int, Sequence[tuple[BoundingBox, float]]]],
    config: TrackerConfig | None = None,
) -> list[tuple[int, list[TrackOutput]]]:
    """Run a fresh tracker over ``(frame_index, detections)`` pairs."""
    tracker = Tracker(config)
    return [(f, tracker.step(dets, f)) for f, dets in frames]
