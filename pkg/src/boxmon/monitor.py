"""Per-class runtime monitors built from reference activations.

A class monitor keeps two sets of tight boxes: hulls of clustered activations
from inputs the network classified correctly into the class, and hulls from
inputs it misclassified into the class. At run time a feature vector is
checked against both sets and the verdict follows a fixed truth table over
(inside-correct, inside-incorrect).
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .clustering import ClusteringConfig, kmeans_by_tau
from .errors import (
    DimensionMismatch,
    EmptyPointSet,
    InputError,
    MalformedMonitorFile,
    UnknownClass,
)
from .geometry import Box, box_of
from .validation import as_vector

FILE_VERSION = 1


class Verdict(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    UNCERTAINTY = "uncertainty"


@dataclass(frozen=True)
class FeatureRecord:
    """One monitored sample: layer activations plus true and predicted class.

    A true label of -1 marks an input from outside the known classes.
    """

    features: tuple[float, ...]
    true_label: int
    predicted_label: int

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(float(v) for v in np.asarray(self.features).ravel()))
        object.__setattr__(self, "true_label", int(self.true_label))
        object.__setattr__(self, "predicted_label", int(self.predicted_label))
        if self.true_label < -1:
            raise InputError(f"true label must be >= -1, got {self.true_label}")
        if self.predicted_label < 0:
            raise InputError(f"predicted label must be >= 0, got {self.predicted_label}")


@dataclass(frozen=True)
class ClassMonitor:
    class_id: int
    layer_id: int
    tau_correct: float
    tau_incorrect: float
    resolution: int | None
    correct_boxes: tuple[Box, ...]
    incorrect_boxes: tuple[Box, ...]

    def __post_init__(self):
        object.__setattr__(self, "correct_boxes", tuple(self.correct_boxes))
        object.__setattr__(self, "incorrect_boxes", tuple(self.incorrect_boxes))
        dims = {b.dim for b in self.correct_boxes + self.incorrect_boxes}
        if len(dims) > 1:
            raise DimensionMismatch(f"monitor boxes mix dimensions {sorted(dims)}")

    @property
    def dim(self) -> int | None:
        boxes = self.correct_boxes + self.incorrect_boxes
        return boxes[0].dim if boxes else None


def build_class_monitor(
    records,
    class_id: int,
    layer_id: int,
    tau_correct: float,
    tau_incorrect: float,
    cfg: ClusteringConfig,
    resolution: int | None = None,
) -> ClassMonitor:
    """Cluster the class's correct and misclassified reference activations
    separately (each with its own tau) and wrap every cluster in a tight box.

    An empty reference set on either side simply yields no boxes there.
    """
    records = list(records)
    if not records:
        raise EmptyPointSet("no reference records to build a monitor from")
    dims = {len(r.features) for r in records}
    if len(dims) != 1:
        raise DimensionMismatch(f"records mix feature dimensions {sorted(dims)}")

    def boxes_for(feats, tau):
        if not feats:
            return ()
        partition = kmeans_by_tau(np.array(feats), dataclasses.replace(cfg, tau=tau))
        return tuple(box_of(block) for block in partition.blocks)

    correct = [r.features for r in records if r.predicted_label == class_id and r.true_label == class_id]
    incorrect = [r.features for r in records if r.predicted_label == class_id and r.true_label != class_id]
    return ClassMonitor(
        class_id=int(class_id),
        layer_id=int(layer_id),
        tau_correct=float(tau_correct),
        tau_incorrect=float(tau_incorrect),
        resolution=resolution,
        correct_boxes=boxes_for(correct, tau_correct),
        incorrect_boxes=boxes_for(incorrect, tau_incorrect),
    )


def monitor_verdict(monitor: ClassMonitor, feature) -> Verdict:
    """Truth table over box membership, closed on all box faces:
    in both sets -> Uncertainty, correct only -> Accept, otherwise Reject."""
    v = as_vector(feature, dim=monitor.dim)
    in_correct = any(b.contains(v) for b in monitor.correct_boxes)
    in_incorrect = any(b.contains(v) for b in monitor.incorrect_boxes)
    if in_correct and in_incorrect:
        return Verdict.UNCERTAINTY
    if in_correct:
        return Verdict.ACCEPT
    return Verdict.REJECT


def run_monitor(monitors: Mapping[int, ClassMonitor], record: FeatureRecord) -> Verdict:
    """Dispatch on the record's predicted class and query that monitor."""
    monitor = monitors.get(record.predicted_label)
    if monitor is None:
        raise UnknownClass(f"no monitor for predicted class {record.predicted_label}")
    return monitor_verdict(monitor, record.features)


def serialize_monitor(monitors: Mapping[int, ClassMonitor]) -> str:
    """Render monitors as the versioned JSON interchange document.

    Classes are emitted in ascending id order and each box list in
    lexicographic bound order, so equal monitor sets serialize identically.
    All monitors must agree on layer and resolution, which are stored once.
    """
    layers = set()
    resolutions = set()
    classes = []
    for class_id in sorted(monitors):
        m = monitors[class_id]
        if m.class_id != class_id:
            raise InputError(f"monitor keyed {class_id} carries class_id {m.class_id}")
        layers.add(m.layer_id)
        resolutions.add(m.resolution)
        classes.append(
            {
                "class": m.class_id,
                "tau_correct": m.tau_correct,
                "tau_incorrect": m.tau_incorrect,
                "correct_boxes": sorted([list(pair) for pair in b.intervals] for b in m.correct_boxes),
                "incorrect_boxes": sorted([list(pair) for pair in b.intervals] for b in m.incorrect_boxes),
            }
        )
    if len(layers) > 1:
        raise InputError(f"monitors span several layers {sorted(layers)}; serialize one layer per file")
    if len(resolutions) > 1:
        raise InputError(f"monitors disagree on resolution {resolutions}")
    doc = {
        "version": FILE_VERSION,
        "layer": layers.pop() if layers else None,
        "resolution": resolutions.pop() if resolutions else None,
        "classes": classes,
    }
    return json.dumps(doc, indent=2)


def _fail(path: str, message: str):
    raise MalformedMonitorFile(f"{path}: {message}")


def _want_int(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(path, f"expected an integer >= {minimum}, got {value}")
    return value


def _want_unit_float(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    value = float(value)
    if not 0.0 <= value <= 1.0:
        _fail(path, f"expected a value in [0, 1], got {value}")
    return value


def _parse_boxes(raw, path, expected_dim):
    if not isinstance(raw, list):
        _fail(path, f"expected a list of boxes, got {raw!r}")
    boxes = []
    for j, raw_box in enumerate(raw):
        box_path = f"{path}[{j}]"
        if not isinstance(raw_box, list) or not raw_box:
            _fail(box_path, "expected a non-empty list of [lower, upper] pairs")
        if expected_dim is not None and len(raw_box) != expected_dim:
            _fail(box_path, f"box dimension {len(raw_box)} differs from {expected_dim}")
        expected_dim = len(raw_box)
        intervals = []
        for d, pair in enumerate(raw_box):
            pair_path = f"{box_path}[{d}]"
            if not isinstance(pair, list) or len(pair) != 2:
                _fail(pair_path, f"expected a [lower, upper] pair, got {pair!r}")
            lo, hi = pair
            for v in (lo, hi):
                if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                    _fail(pair_path, f"expected finite numbers, got {pair!r}")
            if lo > hi:
                _fail(pair_path, f"lower {lo} exceeds upper {hi}")
            intervals.append((float(lo), float(hi)))
        boxes.append(Box(tuple(intervals)))
    return tuple(boxes), expected_dim


def deserialize_monitor(text: str) -> dict[int, ClassMonitor]:
    """Parse the JSON interchange document back into monitors keyed by class.

    Every structural problem raises MalformedMonitorFile naming the offending
    field by its path, e.g. "classes[0].correct_boxes[1][0]: lower 3.0
    exceeds upper 1.0".
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedMonitorFile(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        _fail("top level", f"expected an object, got {type(doc).__name__}")
    version = doc.get("version")
    if version != FILE_VERSION:
        _fail("version", f"expected {FILE_VERSION}, got {version!r}")
    raw_classes = doc.get("classes")
    if not isinstance(raw_classes, list):
        _fail("classes", f"expected a list, got {raw_classes!r}")
    layer = doc.get("layer")
    if layer is None:
        if raw_classes:
            _fail("layer", "required when classes are present")
    else:
        layer = _want_int(layer, "layer", minimum=0)
    resolution = doc.get("resolution")
    if resolution is not None:
        resolution = _want_int(resolution, "resolution", minimum=1)

    monitors: dict[int, ClassMonitor] = {}
    for i, entry in enumerate(raw_classes):
        path = f"classes[{i}]"
        if not isinstance(entry, dict):
            _fail(path, f"expected an object, got {entry!r}")
        class_id = _want_int(entry.get("class"), f"{path}.class", minimum=0)
        if class_id in monitors:
            _fail(f"{path}.class", f"duplicate class id {class_id}")
        tau_correct = _want_unit_float(entry.get("tau_correct"), f"{path}.tau_correct")
        tau_incorrect = _want_unit_float(entry.get("tau_incorrect"), f"{path}.tau_incorrect")
        correct, dim = _parse_boxes(entry.get("correct_boxes"), f"{path}.correct_boxes", None)
        incorrect, _ = _parse_boxes(entry.get("incorrect_boxes"), f"{path}.incorrect_boxes", dim)
        monitors[class_id] = ClassMonitor(
            class_id=class_id,
            layer_id=layer,
            tau_correct=tau_correct,
            tau_incorrect=tau_incorrect,
            resolution=resolution,
            correct_boxes=correct,
            incorrect_boxes=incorrect,
        )
    return monitors


class BoxMonitor(BaseEstimator):
    """Estimator wrapper: fit builds one monitor per class seen in the
    training labels, predict returns the verdict string for each row."""

    def __init__(
        self,
        tau_correct=0.8,
        tau_incorrect=0.8,
        layer_id=0,
        resolution=None,
        seed=42,
        restarts=10,
        max_iter=300,
        center_tol=1e-6,
    ):
        self.tau_correct = tau_correct
        self.tau_incorrect = tau_incorrect
        self.layer_id = layer_id
        self.resolution = resolution
        self.seed = seed
        self.restarts = restarts
        self.max_iter = max_iter
        self.center_tol = center_tol

    def _config(self) -> ClusteringConfig:
        return ClusteringConfig(
            tau=0.5,
            seed=self.seed,
            restarts=self.restarts,
            max_iter=self.max_iter,
            center_tol=self.center_tol,
        )

    def fit(self, X, y_true, y_pred):
        X = check_array(X, dtype=np.float64)
        y_true = np.asarray(y_true, dtype=np.int64)
        y_pred = np.asarray(y_pred, dtype=np.int64)
        if y_true.shape != (X.shape[0],) or y_pred.shape != (X.shape[0],):
            raise InputError("X, y_true and y_pred must have one entry per row")
        records = [
            FeatureRecord(tuple(x), int(t), int(p))
            for x, t, p in zip(X, y_true, y_pred)
        ]
        classes = sorted({int(t) for t in y_true if t >= 0} | {int(p) for p in y_pred})
        cfg = self._config()
        self.monitors_ = {
            y: build_class_monitor(
                records, y, self.layer_id, self.tau_correct, self.tau_incorrect,
                cfg, resolution=self.resolution,
            )
            for y in classes
        }
        self.classes_ = np.array(classes, dtype=np.int64)
        return self

    def predict(self, X, y_pred):
        check_is_fitted(self, "monitors_")
        X = check_array(X, dtype=np.float64)
        y_pred = np.asarray(y_pred, dtype=np.int64)
        if y_pred.shape != (X.shape[0],):
            raise InputError("X and y_pred must have one entry per row")
        out = [
            run_monitor(self.monitors_, FeatureRecord(tuple(x), -1, int(p))).value
            for x, p in zip(X, y_pred)
        ]
        return np.array(out)
