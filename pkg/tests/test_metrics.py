import random

import pytest

from fishtrack.errors import InputContractError, UndefinedMetricError
from fishtrack.geometry import BoundingBox
from fishtrack.metrics import EvalCounts, Trajectory, clear_mot, evaluate, id_metrics, mota, motp, report_from_counts
from oracles import id_metrics_oracle


def traj(ident, frames):
    t = Trajectory(ident)
    for f, b in frames.items():
        t.add(f, BoundingBox(*b))
    return t


A = (0, 0, 10, 10)
A2 = (1, 0, 10, 10)
FAR = (100, 100, 10, 10)


def test_perfect_tracker():
    gt = [traj(1, {1: A, 2: A2}), traj(2, {1: FAR, 2: FAR})]
    pred = [traj(7, {1: A, 2: A2}), traj(8, {1: FAR, 2: FAR})]
    c = clear_mot(gt, pred)
    assert (c.fn, c.fp, c.switches, c.num_gt) == (0, 0, 0, 4)
    assert c.match_distances == [0.0] * 4
    ids = id_metrics(gt, pred)
    assert (ids.idf1, ids.idp, ids.idr) == (1.0, 1.0, 1.0)


def test_single_switch():
    gt = [traj(1, {1: A, 2: A})]
    pred = [traj(1, {1: A}), traj(2, {2: A})]
    c = clear_mot(gt, pred)
    assert (c.switches, c.fn, c.fp, c.num_gt) == (1, 0, 0, 2)
    assert mota(c) == 0.5
    ids = id_metrics(gt, pred)
    assert (ids.idtp, ids.idfp, ids.idfn) == (1, 1, 1)
    assert ids.idf1 == 0.5


def test_single_miss():
    c = clear_mot([traj(1, {1: A})], [])
    assert (c.fn, c.fp, c.num_gt) == (1, 0, 1)
    ids = id_metrics([traj(1, {1: A})], [])
    assert ids.idf1 == 0.0 and ids.idr == 0.0
    assert ids.idp == 0.0 and not ids.idp_defined


def test_mota_arithmetic():
    assert mota(EvalCounts(num_gt=10)) == 1.0
    assert mota(EvalCounts(fn=1, fp=1, num_gt=10)) == pytest.approx(0.8)
    assert mota(EvalCounts(fn=6, fp=6, num_gt=10)) == pytest.approx(-0.2)
    with pytest.raises(UndefinedMetricError):
        mota(EvalCounts())


def test_motp_arithmetic():
    assert motp(EvalCounts(match_distances=[0.0, 0.0])) == 0.0
    assert motp(EvalCounts(match_distances=[0.0, 2 / 3])) == pytest.approx(1 / 3)
    assert motp(EvalCounts(match_distances=[0.5])) == 0.5
    assert motp(EvalCounts(match_distances=[0.5, 0.0]), mode="overlap") == 0.75
    with pytest.raises(UndefinedMetricError):
        motp(EvalCounts())
    with pytest.raises(ValueError):
        motp(EvalCounts(match_distances=[0.1]), mode="nope")


def test_carry_forward_beats_better_newcomer():
    # frame 2: pred 2 overlaps gt better, but the existing correspondence stays valid
    gt = [traj(1, {1: A, 2: A})]
    pred = [traj(1, {1: A, 2: (2, 0, 10, 10)}), traj(2, {2: A})]
    c = clear_mot(gt, pred)
    assert c.switches == 0 and c.fp == 1


def test_switch_counted_across_gap():
    gt = [traj(1, {1: A, 2: A, 3: A})]
    pred = [traj(1, {1: A}), traj(2, {3: A})]
    c = clear_mot(gt, pred)
    assert (c.switches, c.fn) == (1, 1)


def test_hand_sequence_mota():
    # frame1: both matched; frame2: gt 2 missed, pred 30 is a false positive;
    # frame3: gt 1 picked up by pred 30 (switch)
    gt = [traj(1, {1: A, 2: A, 3: A}), traj(2, {1: FAR, 2: FAR})]
    pred = [
        traj(10, {1: A, 2: A}),
        traj(20, {1: FAR}),
        traj(30, {2: (500, 500, 10, 10), 3: A}),
    ]
    c = clear_mot(gt, pred)
    assert (c.fn, c.fp, c.switches, c.num_gt) == (1, 1, 1, 5)
    assert mota(c) == 1 - 3 / 5


def test_threshold_strict():
    gt = [traj(1, {1: (0, 0, 10, 10)})]
    pred = [traj(1, {1: (0, 0, 10, 5)})]  # IOU exactly 0.5
    c = clear_mot(gt, pred, 0.5)
    assert (c.fn, c.fp) == (1, 1)
    assert id_metrics(gt, pred, 0.5).idtp == 0


def test_duplicate_frame_rejected():
    t = Trajectory(1)
    t.add(1, BoundingBox(*A))
    with pytest.raises(InputContractError):
        t.add(1, BoundingBox(*A))


def test_duplicate_identity_rejected():
    with pytest.raises(InputContractError):
        clear_mot([traj(1, {1: A}), traj(1, {2: A})], [])


def test_both_empty_id_metrics_undefined():
    with pytest.raises(UndefinedMetricError):
        id_metrics([], [])


def test_evaluate_report_flags_undefined():
    r = evaluate([], [traj(1, {1: A})])
    assert "mota" in r.undefined and "idr" in r.undefined
    assert r.counts.fp == 1 and r.counts.idfp == 1
    r = evaluate([], [])
    assert set(r.undefined) == {"mota", "motp", "idp", "idr", "idf1"}


def test_counts_fold_is_commutative():
    a = clear_mot([traj(1, {1: A, 2: A})], [traj(1, {1: A}), traj(2, {2: A})])
    b = clear_mot([traj(1, {1: A})], [])
    assert report_from_counts(a + b).mota == report_from_counts(b + a).mota
    assert (a + b).num_gt == 3


def random_micro_instance(rng):
    palette = [(0, 0, 10, 10), (3, 0, 10, 10), (0, 4, 10, 10), (40, 40, 10, 10), (44, 40, 10, 10)]

    def side(n_ids):
        out = {}
        for i in range(1, n_ids + 1):
            frames = {f: rng.choice(palette) for f in range(1, 5) if rng.random() < 0.7}
            out[i] = frames
        return out

    return side(rng.randint(0, 3)), side(rng.randint(0, 3))


def as_trajs(d):
    return [traj(i, frames) for i, frames in d.items()]


def test_id_metrics_against_pairing_oracle():
    rng = random.Random(4)
    checked = 0
    for _ in range(400):
        gt, pred = random_micro_instance(rng)
        if not any(gt.values()) and not any(pred.values()):
            continue
        ids = id_metrics(as_trajs(gt), as_trajs(pred), 0.5)
        assert (ids.idtp, ids.idfp, ids.idfn) == id_metrics_oracle(gt, pred, 0.5)
        checked += 1
    assert checked > 300


def test_relabeling_invariance():
    rng = random.Random(8)
    for _ in range(100):
        gt = [traj(i, {f: (rng.uniform(0, 40), rng.uniform(0, 40), 10, 10) for f in range(1, 5)}) for i in range(3)]
        pred = []
        for g in gt:
            pred.append(traj(g.identity, {f: (b.x + rng.uniform(-3, 3), b.y, 10, 10) for f, b in g.boxes.items() if rng.random() < 0.8}))
        perm = [5, 3, 9]
        relabeled = [traj(perm[p.identity], {f: (b.x, b.y, b.w, b.h) for f, b in p.boxes.items()}) for p in pred]
        c1, c2 = clear_mot(gt, pred), clear_mot(gt, relabeled)
        assert (c1.fn, c1.fp, c1.switches) == (c2.fn, c2.fp, c2.switches)
        assert id_metrics(gt, pred) == id_metrics(gt, relabeled)


def test_id_totals_identity():
    rng = random.Random(2)
    for _ in range(200):
        gt, pred = random_micro_instance(rng)
        if not any(gt.values()) and not any(pred.values()):
            continue
        ids = id_metrics(as_trajs(gt), as_trajs(pred))
        assert ids.idtp + ids.idfn == sum(len(v) for v in gt.values())
        assert ids.idtp + ids.idfp == sum(len(v) for v in pred.values())
        if ids.idp_defined and ids.idr_defined and ids.idtp > 0:
            hm = 2 * ids.idp * ids.idr / (ids.idp + ids.idr)
            assert ids.idf1 == pytest.approx(hm, abs=1e-12)
