"""Synthetic multi-fish scenes: ground-truth box trajectories plus corrupted
detections and a complete log of every corruption.

Randomness comes from numpy's PCG64 bit generator seeded with
``SceneConfig.seed``. Draws happen in a fixed order and in fixed amounts per
frame whatever the noise settings, so changing one rate never reshuffles the
others' random streams.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .errors import ConfigError
from .geometry import BoundingBox, iou
from .metrics import Trajectory

MIN_FISH_SIZE = 8.0
FISH_ASPECT = 0.45  # height / width of a fish box seen from above
MIN_SPEED_FRACTION = 0.25
CLUTTER_SIZE = 40.0
TRUE_CONFIDENCE = 1.0
FP_CONFIDENCE_RANGE = (0.15, 0.6)


@dataclass(frozen=True)
class SceneConfig:
    tank_width: float = 1920.0
    tank_height: float = 1080.0
    fps: float = 30.0
    duration_frames: int = 450
    fish_count: int = 10
    fish_size: tuple[float, float] = (120.0, 12.0)
    speed_max: float = 5.0
    turn_rate: float = 0.08
    occlusion_iou: float = 0.3
    fn_rate: float = 0.0
    fp_rate: float = 0.0
    jitter_std: float = 0.0
    clutter_count: int = 0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "fish_size", tuple(float(v) for v in self.fish_size))
        for name in ("occlusion_iou", "fn_rate", "fp_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name}={v} outside [0, 1]")
        if self.tank_width <= 0 or self.tank_height <= 0 or self.fps <= 0:
            raise ConfigError("tank dimensions and fps must be positive")
        if self.duration_frames < 1:
            raise ConfigError("duration_frames must be >= 1")
        if self.fish_count < 0 or self.clutter_count < 0:
            raise ConfigError("fish_count and clutter_count must be >= 0")
        if len(self.fish_size) != 2 or self.fish_size[0] <= 0 or self.fish_size[1] < 0:
            raise ConfigError("fish_size must be (mean > 0, stddev >= 0)")
        max_w = min(self.tank_width, self.tank_height / FISH_ASPECT)
        if self.fish_size[0] >= max_w:
            raise ConfigError("fish_size mean does not fit in the tank")
        if self.speed_max < 0 or self.turn_rate < 0 or self.jitter_std < 0:
            raise ConfigError("speed_max, turn_rate and jitter_std must be >= 0")

    @classmethod
    def from_dict(cls, data: dict) -> SceneConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown scene config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fish_size"] = list(self.fish_size)
        return d


@dataclass(frozen=True)
class SceneEvent:
    """One corruption applied to the ground truth.

    kind is ``occlusion`` (fish hidden by ``other``), ``fn`` (random miss),
    ``jitter`` (fish reported at ``box``) or ``fp`` (spurious ``box``).
    """

    frame: int
    kind: str
    fish: int | None = None
    other: int | None = None
    box: BoundingBox | None = None
    confidence: float | None = None


@dataclass
class SceneOutput:
    config: SceneConfig
    gt: list[Trajectory]
    detections: dict[int, list[tuple[BoundingBox, float]]]
    events: list[SceneEvent] = field(default_factory=list)

    @property
    def frames(self) -> range:
        return range(1, self.config.duration_frames + 1)


def _clip(box: BoundingBox, width: float, height: float) -> BoundingBox:
    x1 = min(max(box.x, 0.0), width)
    y1 = min(max(box.y, 0.0), height)
    x2 = min(max(box.x + box.w, 0.0), width)
    y2 = min(max(box.y + box.h, 0.0), height)
    return BoundingBox(x1, y1, x2 - x1, y2 - y1)


def simulate(config: SceneConfig) -> SceneOutput:
    """Generate one scene. Frames are numbered from 1."""
    rng = np.random.Generator(np.random.PCG64(config.seed))
    W, H = config.tank_width, config.tank_height
    n = config.fish_count

    mean, std = config.fish_size
    widths = np.clip(rng.normal(mean, std, n), MIN_FISH_SIZE, min(W, H / FISH_ASPECT) * 0.9)
    heights = widths * FISH_ASPECT
    cx = rng.uniform(widths / 2, W - widths / 2)
    cy = rng.uniform(heights / 2, H - heights / 2)
    heading = rng.uniform(-math.pi, math.pi, n)
    speed = rng.uniform(MIN_SPEED_FRACTION, 1.0, n) * config.speed_max
    clutter = np.column_stack(
        [rng.uniform(0, W - CLUTTER_SIZE, config.clutter_count), rng.uniform(0, H - CLUTTER_SIZE, config.clutter_count)]
    )

    gt = [Trajectory(i + 1) for i in range(n)]
    detections: dict[int, list[tuple[BoundingBox, float]]] = {}
    events: list[SceneEvent] = []
    fp_slots = max(config.clutter_count, 1)

    for frame in range(1, config.duration_frames + 1):
        if frame > 1:
            heading = heading + rng.uniform(-config.turn_rate, config.turn_rate, n)
            speed = np.clip(
                speed + rng.normal(0.0, 0.1 * config.speed_max, n),
                MIN_SPEED_FRACTION * config.speed_max,
                config.speed_max,
            )
            cx = cx + speed * np.cos(heading)
            cy = cy + speed * np.sin(heading)
            # reflect off the tank walls
            lo_x, hi_x = widths / 2, W - widths / 2
            lo_y, hi_y = heights / 2, H - heights / 2
            hit = cx < lo_x
            cx = np.where(hit, 2 * lo_x - cx, cx)
            heading = np.where(hit, math.pi - heading, heading)
            hit = cx > hi_x
            cx = np.where(hit, 2 * hi_x - cx, cx)
            heading = np.where(hit, math.pi - heading, heading)
            hit = cy < lo_y
            cy = np.where(hit, 2 * lo_y - cy, cy)
            heading = np.where(hit, -heading, heading)
            hit = cy > hi_y
            cy = np.where(hit, 2 * hi_y - cy, cy)
            heading = np.where(hit, -heading, heading)
            cx = np.clip(cx, lo_x, hi_x)
            cy = np.clip(cy, lo_y, hi_y)

        boxes = [
            _clip(BoundingBox(float(cx[i] - widths[i] / 2), float(cy[i] - heights[i] / 2), float(widths[i]), float(heights[i])), W, H)
            for i in range(n)
        ]
        for i, b in enumerate(boxes):
            gt[i].add(frame, b)

        # fixed-size draws per frame
        miss_u = rng.uniform(size=n)
        jitter = rng.normal(0.0, 1.0, (n, 4))
        fp_u = rng.uniform(size=fp_slots)
        fp_pos = rng.uniform(size=(fp_slots, 2))
        fp_off = rng.normal(0.0, 1.0, (fp_slots, 2))
        fp_conf = rng.uniform(*FP_CONFIDENCE_RANGE, size=fp_slots)

        hidden: dict[int, int] = {}
        if config.occlusion_iou < 1.0:
            for i in range(n):
                for j in range(i + 1, n):
                    if iou(boxes[i], boxes[j]) > config.occlusion_iou:
                        small, big = (i, j) if boxes[i].area < boxes[j].area else (j, i)
                        hidden.setdefault(small, big)

        frame_dets: list[tuple[BoundingBox, float]] = []
        for i in range(n):
            if i in hidden:
                events.append(SceneEvent(frame, "occlusion", fish=i + 1, other=hidden[i] + 1))
                continue
            if miss_u[i] < config.fn_rate:
                events.append(SceneEvent(frame, "fn", fish=i + 1))
                continue
            b = boxes[i]
            if config.jitter_std > 0:
                dx, dy, dw, dh = (jitter[i] * config.jitter_std).tolist()
                b = _clip(BoundingBox(b.x + dx, b.y + dy, max(b.w + dw, 1.0), max(b.h + dh, 1.0)), W, H)
                events.append(SceneEvent(frame, "jitter", fish=i + 1, box=b))
            frame_dets.append((b, TRUE_CONFIDENCE))

        for k in range(fp_slots):
            if fp_u[k] >= config.fp_rate:
                continue
            if config.clutter_count:
                ox, oy = clutter[k] + fp_off[k] * CLUTTER_SIZE * 0.1
            else:
                ox, oy = fp_pos[k, 0] * (W - CLUTTER_SIZE), fp_pos[k, 1] * (H - CLUTTER_SIZE)
            b = _clip(BoundingBox(float(ox), float(oy), CLUTTER_SIZE, CLUTTER_SIZE), W, H)
            conf = float(fp_conf[k])
            events.append(SceneEvent(frame, "fp", box=b, confidence=conf))
            frame_dets.append((b, conf))

        detections[frame] = frame_dets

    return SceneOutput(config, gt, detections, events)


def replay_events(gt: list[Trajectory], events: list[SceneEvent], n_frames: int) -> dict[int, list[tuple[BoundingBox, float]]]:
    """Rebuild detections from ground truth and the event log alone."""
    by_frame: dict[int, list[SceneEvent]] = {}
    for e in events:
        by_frame.setdefault(e.frame, []).append(e)
    out = {}
    for frame in range(1, n_frames + 1):
        evs = by_frame.get(frame, [])
        dropped = {e.fish for e in evs if e.kind in ("occlusion", "fn")}
        moved = {e.fish: e.box for e in evs if e.kind == "jitter"}
        dets = []
        for t in gt:
            if frame not in t.boxes or t.identity in dropped:
                continue
            dets.append((moved.get(t.identity, t.boxes[frame]), TRUE_CONFIDENCE))
        dets += [(e.box, e.confidence) for e in evs if e.kind == "fp"]
        out[frame] = dets
    return out
