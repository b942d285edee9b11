"""Query-based multi-fish tracking core: box geometry, assignment, query merging,
an online tracker, loss diagnostics, CLEAR-MOT / identity metrics and a
synthetic scene simulator."""

from .geometry import BoundingBox, giou, iou
from .assignment import FORBIDDEN, Matching, solve_min_cost
from .qtsi import Query, QueryKind, QtsiConfig, QtsiDecision, DecisionSource, qtsi_merge
from .tracker import Tracker, TrackerConfig, TrackOutput, TrackState
from .losses import LossWeights, FrameLossStats, focal_loss, frame_loss, joint_average_loss
from .metrics import EvalCounts, EvalReport, Trajectory, clear_mot, evaluate, id_metrics, mota, motp
from .simulator import SceneConfig, SceneOutput, simulate

__version__ = "0.1.0"

__all__ = [
    "BoundingBox", "iou", "giou",
    "FORBIDDEN", "Matching", "solve_min_cost",
    "Query", "QueryKind", "QtsiConfig", "QtsiDecision", "DecisionSource", "qtsi_merge",
    "Tracker", "TrackerConfig", "TrackOutput", "TrackState",
    "LossWeights", "FrameLossStats", "focal_loss", "frame_loss", "joint_average_loss",
    "EvalCounts", "EvalReport", "Trajectory", "clear_mot", "evaluate", "id_metrics", "mota", "motp",
    "SceneConfig", "SceneOutput", "simulate",
]
