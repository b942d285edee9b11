import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fishtrack.errors import ConfigError, UndefinedMetricError
from fishtrack.geometry import BoundingBox
from fishtrack.losses import FrameLossStats, LossWeights, MatchedPair, focal_loss, frame_loss, joint_average_loss


def test_focal_values():
    assert focal_loss(0.5, True, 0.25, 2.0) == pytest.approx(0.25 * 0.25 * math.log(2), abs=1e-12)
    assert focal_loss(0.5, True, 0.25, 2.0) == pytest.approx(0.043321, abs=1e-6)
    assert focal_loss(0.9, True, 0.25, 2.0) == pytest.approx(2.634e-4, abs=1e-7)
    assert focal_loss(1.0, True) < 1e-20


def test_focal_negative_branch():
    # -(1 - alpha) p^gamma ln(1 - p)
    assert focal_loss(0.5, False, 0.25, 2.0) == pytest.approx(0.75 * 0.25 * math.log(2), abs=1e-12)
    assert focal_loss(0.0, False) < 1e-20


def test_focal_clamps_probability():
    assert math.isfinite(focal_loss(0.0, True))
    assert math.isfinite(focal_loss(1.0, False))


def test_frame_loss_perfect_prediction():
    b = BoundingBox(10, 20, 30, 40)
    assert frame_loss([(b, 1.0, b)]) == pytest.approx(0.0, abs=1e-9)


def test_frame_loss_l1_only():
    pair = (BoundingBox(0, 0, 2, 2), 1.0, BoundingBox(1, 0, 2, 2))
    got = frame_loss([pair], LossWeights(0, 1, 0), image_size=(10, 10))
    assert got == pytest.approx(0.025, abs=1e-9)


def test_frame_loss_giou_only():
    pair = MatchedPair(BoundingBox(0, 0, 2, 2), 1.0, BoundingBox(1, 0, 2, 2))
    got = frame_loss([pair], LossWeights(0, 0, 1), image_size=(10, 10))
    assert got == pytest.approx(2 / 3, abs=1e-9)


def test_frame_loss_empty_is_zero():
    assert frame_loss([]) == 0.0


def test_frame_loss_combines_means():
    p1 = (BoundingBox(0, 0, 2, 2), 0.5, BoundingBox(1, 0, 2, 2))
    p2 = (BoundingBox(5, 5, 2, 2), 0.9, BoundingBox(5, 5, 2, 2))
    w = LossWeights(2.0, 5.0, 2.0)
    cls = (focal_loss(0.5, True) + focal_loss(0.9, True)) / 2
    l1 = (0.025 + 0.0) / 2
    g = (2 / 3 + 0.0) / 2
    assert frame_loss([p1, p2], w, image_size=(10, 10)) == pytest.approx(2 * cls + 5 * l1 + 2 * g, abs=1e-12)


def test_negative_weight_rejected():
    with pytest.raises(ConfigError):
        LossWeights(-1, 0, 0)


def test_joint_average_examples():
    assert joint_average_loss([FrameLossStats(2.0, 1.0, 2, 1)]) == pytest.approx(1.0, abs=1e-12)
    assert joint_average_loss([FrameLossStats(3.0, 0.0, 3, 0), FrameLossStats(2.0, 0.0, 2, 0)]) == pytest.approx(1.0)
    assert joint_average_loss([FrameLossStats(0.0, 0.0, 1, 1)]) == 0.0


def test_joint_average_undefined():
    with pytest.raises(UndefinedMetricError):
        joint_average_loss([FrameLossStats(1.0, 1.0, 0, 0)])
    with pytest.raises(UndefinedMetricError):
        joint_average_loss([])


box = st.builds(
    BoundingBox,
    st.floats(0, 1000),
    st.floats(0, 1000),
    st.floats(1, 300),
    st.floats(1, 300),
)
pair = st.tuples(box, st.floats(0, 1), box)


@given(st.lists(pair, min_size=1, max_size=5), st.floats(0.01, 100))
def test_linear_in_weights(pairs, c):
    w = LossWeights(1.3, 0.7, 2.1)
    assert frame_loss(pairs, w.scaled(c)) == pytest.approx(c * frame_loss(pairs, w), rel=1e-9)


@given(st.lists(pair, min_size=1, max_size=5))
def test_non_negative(pairs):
    assert frame_loss(pairs) >= 0.0


def test_order_invariance():
    rng = random.Random(1)
    frames = [FrameLossStats(rng.random(), rng.random(), rng.randint(0, 5), rng.randint(1, 5)) for _ in range(30)]
    shuffled = frames[:]
    rng.shuffle(shuffled)
    assert joint_average_loss(frames) == joint_average_loss(shuffled)
