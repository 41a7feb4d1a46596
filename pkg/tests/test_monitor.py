import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.exceptions import NotFittedError

from boxmon.clustering import ClusteringConfig
from boxmon.errors import (
    DimensionMismatch,
    InputError,
    MalformedMonitorFile,
    UnknownClass,
)
from boxmon.geometry import Box, intersect
from boxmon.monitor import (
    BoxMonitor,
    ClassMonitor,
    FeatureRecord,
    Verdict,
    build_class_monitor,
    deserialize_monitor,
    monitor_verdict,
    run_monitor,
    serialize_monitor,
)

from conftest import (
    TOY_CORRECT_BOXES,
    TOY_FEATURES,
    TOY_INCORRECT_BOX,
    TOY_PRED,
    TOY_TRUE,
)


def toy_monitor(tau_correct=0.8, tau_incorrect=1.0, class_id=0):
    records = [
        FeatureRecord(f, t, p) for f, t, p in zip(TOY_FEATURES, TOY_TRUE, TOY_PRED)
    ]
    return build_class_monitor(
        records, class_id, 2, tau_correct, tau_incorrect, ClusteringConfig(tau=0.5)
    )


def box_set(boxes):
    return {b.intervals for b in boxes}


def test_build_worked_example(toy_records):
    cm = build_class_monitor(toy_records, 0, 2, 0.8, 1.0, ClusteringConfig(tau=0.5))
    assert cm.class_id == 0
    assert cm.layer_id == 2
    assert cm.tau_correct == 0.8
    assert cm.tau_incorrect == 1.0
    assert box_set(cm.correct_boxes) == {b for b in map(tuple, TOY_CORRECT_BOXES)}
    assert box_set(cm.incorrect_boxes) == {TOY_INCORRECT_BOX}


def test_build_no_misclassified_into_class(toy_records):
    cm = build_class_monitor(toy_records, 1, 2, 0.8, 1.0, ClusteringConfig(tau=0.5))
    assert cm.incorrect_boxes == ()
    # both correctly classified class-1 rows must sit inside some correct box
    for r in toy_records:
        if r.true_label == 1 and r.predicted_label == 1:
            assert any(b.contains(r.features) for b in cm.correct_boxes)


def test_build_single_correct_record():
    records = [FeatureRecord((0.3, 0.7), 4, 4)]
    cm = build_class_monitor(records, 4, 1, 0.9, 0.9, ClusteringConfig(tau=0.5))
    assert box_set(cm.correct_boxes) == {((0.3, 0.3), (0.7, 0.7))}
    assert cm.incorrect_boxes == ()


def test_build_is_deterministic(toy_records):
    a = build_class_monitor(toy_records, 0, 2, 0.8, 1.0, ClusteringConfig(tau=0.5))
    b = build_class_monitor(toy_records, 0, 2, 0.8, 1.0, ClusteringConfig(tau=0.5))
    assert a == b


def test_build_rejects_ragged_features():
    records = [FeatureRecord((0.1, 0.2), 0, 0), FeatureRecord((0.1, 0.2, 0.3), 0, 0)]
    with pytest.raises(DimensionMismatch):
        build_class_monitor(records, 0, 0, 0.8, 0.8, ClusteringConfig(tau=0.5))


def test_verdicts_worked_example(toy_records):
    monitors = {0: toy_monitor()}
    accepted = FeatureRecord((0.14, 0.13), 0, 0)
    rejected = FeatureRecord((0.58, 0.56), 1, 0)
    assert run_monitor(monitors, accepted) is Verdict.ACCEPT
    assert run_monitor(monitors, rejected) is Verdict.REJECT
    # the two misclassified training rows land in the incorrect box only
    for r in toy_records[4:6]:
        assert run_monitor(monitors, r) is Verdict.REJECT


def test_verdict_truth_table():
    cm = ClassMonitor(
        class_id=0,
        layer_id=0,
        tau_correct=0.5,
        tau_incorrect=0.5,
        resolution=None,
        correct_boxes=(Box(((0.0, 2.0), (0.0, 2.0))),),
        incorrect_boxes=(Box(((1.0, 3.0), (1.0, 3.0))),),
    )
    assert monitor_verdict(cm, (0.5, 0.5)) is Verdict.ACCEPT
    assert monitor_verdict(cm, (1.5, 1.5)) is Verdict.UNCERTAINTY
    assert monitor_verdict(cm, (2.5, 2.5)) is Verdict.REJECT
    assert monitor_verdict(cm, (9.0, 9.0)) is Verdict.REJECT


def test_boundary_membership_is_closed():
    cm = ClassMonitor(0, 0, 0.5, 0.5, None, (Box(((0.0, 1.0),)),), (Box(((1.0, 2.0),)),))
    # the shared face belongs to both boxes
    assert monitor_verdict(cm, (1.0,)) is Verdict.UNCERTAINTY
    assert monitor_verdict(cm, (0.0,)) is Verdict.ACCEPT
    assert monitor_verdict(cm, (2.0,)) is Verdict.REJECT


def test_empty_monitor_rejects_everything():
    cm = ClassMonitor(3, 0, 0.5, 0.5, None, (), ())
    assert monitor_verdict(cm, (0.0, 0.0)) is Verdict.REJECT
    assert monitor_verdict(cm, (1e9, -1e9)) is Verdict.REJECT


def test_verdict_dimension_mismatch():
    cm = ClassMonitor(0, 0, 0.5, 0.5, None, (Box(((0.0, 1.0), (0.0, 1.0))),), ())
    with pytest.raises(DimensionMismatch):
        monitor_verdict(cm, (0.5,))


def test_class_monitor_rejects_mixed_dims():
    with pytest.raises(DimensionMismatch):
        ClassMonitor(0, 0, 0.5, 0.5, None, (Box(((0.0, 1.0),)),), (Box(((0.0, 1.0), (0.0, 1.0))),))


def test_run_monitor_unknown_class(toy_records):
    monitors = {0: toy_monitor()}
    with pytest.raises(UnknownClass):
        run_monitor(monitors, FeatureRecord((0.5, 0.5), 1, 1))


def test_training_correct_records_never_rejected(toy_records):
    for tau_c in (0.0, 0.3, 0.62, 0.8, 0.97, 1.0):
        monitors = {
            y: toy_monitor(tau_correct=tau_c, class_id=y) for y in (0, 1)
        }
        for r in toy_records:
            if r.true_label == r.predicted_label:
                assert run_monitor(monitors, r) is not Verdict.REJECT


@st.composite
def random_monitor_and_features(draw):
    dim = draw(st.integers(1, 3))
    coord = st.floats(-4, 4, allow_nan=False, width=32).map(float)
    box = st.lists(st.tuples(coord, coord), min_size=dim, max_size=dim).map(
        lambda pairs: Box(tuple((min(a, b), max(a, b)) for a, b in pairs))
    )
    correct = tuple(draw(st.lists(box, max_size=2)))
    incorrect = tuple(draw(st.lists(box, max_size=2)))
    features = draw(
        st.lists(
            st.lists(coord, min_size=dim, max_size=dim).map(tuple),
            min_size=1,
            max_size=8,
        )
    )
    return ClassMonitor(0, 0, 0.5, 0.5, None, correct, incorrect), features


@given(random_monitor_and_features())
def test_verdict_matches_hand_containment(case):
    cm, features = case
    for f in features:
        in_c = any(
            all(lo <= x <= hi for x, (lo, hi) in zip(f, b.intervals))
            for b in cm.correct_boxes
        )
        in_inc = any(
            all(lo <= x <= hi for x, (lo, hi) in zip(f, b.intervals))
            for b in cm.incorrect_boxes
        )
        if in_c and in_inc:
            expected = Verdict.UNCERTAINTY
        elif in_c:
            expected = Verdict.ACCEPT
        else:
            expected = Verdict.REJECT
        assert monitor_verdict(cm, f) is expected


@given(random_monitor_and_features())
def test_disjoint_box_sets_never_uncertain(case):
    cm, features = case
    overlapping = any(
        intersect(c, i) is not None
        for c in cm.correct_boxes
        for i in cm.incorrect_boxes
    )
    if overlapping:
        return
    for f in features:
        assert monitor_verdict(cm, f) is not Verdict.UNCERTAINTY


def test_serialize_round_trip_verdicts(toy_records):
    monitors = {y: toy_monitor(class_id=y) for y in (0, 1)}
    text = serialize_monitor(monitors)
    loaded = deserialize_monitor(text)
    assert set(loaded) == {0, 1}
    rng = np.random.default_rng(7)
    probes = [tuple(v) for v in rng.uniform(-0.2, 1.2, size=(200, 2))]
    probes += [tuple(f) for f in TOY_FEATURES]
    for y in (0, 1):
        assert loaded[y].layer_id == 2
        assert loaded[y].tau_correct == monitors[y].tau_correct
        for f in probes:
            assert monitor_verdict(loaded[y], f) is monitor_verdict(monitors[y], f)


def test_serialize_format_is_pinned(toy_records):
    monitors = {1: toy_monitor(class_id=1), 0: toy_monitor(class_id=0)}
    text = serialize_monitor(monitors)
    assert text == serialize_monitor(dict(monitors))
    doc = json.loads(text)
    assert set(doc) == {"version", "layer", "resolution", "classes"}
    assert doc["version"] == 1
    assert doc["layer"] == 2
    assert doc["resolution"] is None
    ids = [c["class"] for c in doc["classes"]]
    assert ids == [0, 1]
    for c in doc["classes"]:
        assert set(c) == {
            "class",
            "tau_correct",
            "tau_incorrect",
            "correct_boxes",
            "incorrect_boxes",
        }
        for boxes in (c["correct_boxes"], c["incorrect_boxes"]):
            for bx in boxes:
                assert all(len(pair) == 2 for pair in bx)
    c0 = doc["classes"][0]
    assert sorted(c0["correct_boxes"]) == [
        [[0.078, 0.222], [0.062, 0.162]],
        [[0.69, 0.79], [0.61, 0.71]],
    ]
    assert c0["incorrect_boxes"] == [[[0.289, 0.389], [0.281, 0.381]]]


def test_serialize_full_precision_floats():
    third = 1.0 / 3.0
    cm = ClassMonitor(0, 0, third, 0.5, 7, (Box(((third, 2 * third),)),), ())
    loaded = deserialize_monitor(serialize_monitor({0: cm}))
    assert loaded[0].tau_correct == third
    assert loaded[0].correct_boxes[0].intervals == ((third, 2 * third),)
    assert loaded[0].resolution == 7


def test_serialize_empty_set():
    text = serialize_monitor({})
    doc = json.loads(text)
    assert doc["classes"] == []
    assert deserialize_monitor(text) == {}


def test_serialize_mixed_layers_rejected():
    a = ClassMonitor(0, 1, 0.5, 0.5, None, (), ())
    b = ClassMonitor(1, 2, 0.5, 0.5, None, (), ())
    with pytest.raises(InputError):
        serialize_monitor({0: a, 1: b})


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("{not json", "JSON"),
        ('{"version": 2, "layer": 0, "resolution": null, "classes": []}', "version"),
        ('{"version": 1, "layer": 0, "resolution": null}', "classes"),
        ('{"version": 1, "layer": 0, "resolution": null, "classes": {}}', "classes"),
        (
            '{"version": 1, "layer": 0, "resolution": null, "classes":'
            ' [{"class": 0, "tau_correct": 0.5, "tau_incorrect": 0.5,'
            ' "correct_boxes": [[[3.0, 1.0]]], "incorrect_boxes": []}]}',
            "classes[0].correct_boxes[0][0]",
        ),
        (
            '{"version": 1, "layer": 0, "resolution": null, "classes":'
            ' [{"class": 0, "tau_correct": 1.5, "tau_incorrect": 0.5,'
            ' "correct_boxes": [], "incorrect_boxes": []}]}',
            "tau_correct",
        ),
        (
            '{"version": 1, "layer": 0, "resolution": null, "classes":'
            ' [{"class": 0, "tau_correct": 0.5, "tau_incorrect": 0.5,'
            ' "correct_boxes": [[[0.0, 1.0]], [[0.0, 1.0], [0.0, 1.0]]],'
            ' "incorrect_boxes": []}]}',
            "classes[0].correct_boxes[1]",
        ),
        (
            '{"version": 1, "layer": 0, "resolution": null, "classes":'
            ' [{"class": 0, "tau_correct": 0.5, "tau_incorrect": 0.5,'
            ' "correct_boxes": [], "incorrect_boxes": []},'
            ' {"class": 0, "tau_correct": 0.5, "tau_incorrect": 0.5,'
            ' "correct_boxes": [], "incorrect_boxes": []}]}',
            "duplicate",
        ),
    ],
)
def test_deserialize_malformed(text, fragment):
    with pytest.raises(MalformedMonitorFile) as err:
        deserialize_monitor(text)
    assert fragment in str(err.value)


def test_feature_record_normalizes():
    r = FeatureRecord(np.array([0.25, 0.75]), np.int64(3), 2)
    assert r.features == (0.25, 0.75)
    assert isinstance(r.true_label, int)
    assert r.true_label == 3 and r.predicted_label == 2


def test_feature_record_label_bounds():
    FeatureRecord((0.0,), -1, 0)  # unknown-class sentinel is legal as true label
    with pytest.raises(InputError):
        FeatureRecord((0.0,), -2, 0)
    with pytest.raises(InputError):
        FeatureRecord((0.0,), 0, -1)


def test_estimator_fit_predict():
    X = np.array(TOY_FEATURES)
    est = BoxMonitor(tau_correct=0.8, tau_incorrect=1.0, layer_id=2)
    est.fit(X, np.array(TOY_TRUE), np.array(TOY_PRED))
    assert sorted(est.monitors_) == [0, 1]
    verdicts = est.predict(X, np.array(TOY_PRED))
    assert verdicts.tolist() == ["accept"] * 4 + ["reject"] * 2 + ["accept"] * 2


def test_estimator_requires_fit():
    with pytest.raises(NotFittedError):
        BoxMonitor().predict(np.zeros((1, 2)), np.zeros(1, dtype=int))


def test_estimator_get_params_round_trip():
    est = BoxMonitor(tau_correct=0.7, tau_incorrect=0.9, layer_id=3, seed=11)
    params = est.get_params()
    assert params["tau_correct"] == 0.7
    assert params["layer_id"] == 3
    clone = BoxMonitor(**params)
    assert clone.get_params() == params


def test_estimator_ignores_unknown_sentinel_class():
    X = np.array([[0.1, 0.1], [0.9, 0.9], [0.5, 0.5]])
    y_true = np.array([0, 0, -1])
    y_pred = np.array([0, 0, 0])
    est = BoxMonitor(tau_correct=1.0, tau_incorrect=1.0).fit(X, y_true, y_pred)
    assert sorted(est.monitors_) == [0]
    # the unknown-labelled row is not a correct sample, so it feeds V^inc
    assert len(est.monitors_[0].incorrect_boxes) == 1
