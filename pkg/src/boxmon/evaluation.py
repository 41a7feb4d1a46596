"""Six-outcome scoring of monitor verdicts and the tau sweep harness.

A record is negative for the monitored class when its true label matches the
class, positive otherwise (inputs from outside the known classes, marked with
true label -1, are positive everywhere). Each verdict then lands in exactly
one of six counters, and precision, recall and F1 are derived from them.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from .clustering import ClusteringConfig, KCache, kmeans_by_tau
from .coverage import CoverageEstimate, clustering_coverage
from .errors import InputError
from .geometry import box_of
from .monitor import ClassMonitor, FeatureRecord, Verdict, run_monitor


@dataclass(frozen=True)
class OutcomeCounts:
    """Confusion-matrix cells for one monitor and test set: true negative,
    false positive, missed negative, false negative, true positive, missed
    positive."""

    tn: int = 0
    fp: int = 0
    mn: int = 0
    fn: int = 0
    tp: int = 0
    mp: int = 0

    def __post_init__(self):
        for name in ("tn", "fp", "mn", "fn", "tp", "mp"):
            v = getattr(self, name)
            if v < 0 or int(v) != v:
                raise InputError(f"{name} must be a non-negative integer, got {v}")

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.mn + self.fn + self.tp + self.mp

    def __add__(self, other: "OutcomeCounts") -> "OutcomeCounts":
        return OutcomeCounts(
            self.tn + other.tn,
            self.fp + other.fp,
            self.mn + other.mn,
            self.fn + other.fn,
            self.tp + other.tp,
            self.mp + other.mp,
        )


_OUTCOME = {
    ("negative", Verdict.ACCEPT): "tn",
    ("negative", Verdict.REJECT): "fp",
    ("negative", Verdict.UNCERTAINTY): "mn",
    ("positive", Verdict.ACCEPT): "fn",
    ("positive", Verdict.REJECT): "tp",
    ("positive", Verdict.UNCERTAINTY): "mp",
}


def classify_outcome(nature: str, verdict: Verdict) -> str:
    """Map (record nature, verdict) to its counter name."""
    key = (nature, verdict)
    if key not in _OUTCOME:
        raise InputError(f"nature must be 'negative' or 'positive', got {nature!r}")
    return _OUTCOME[key]


def evaluate(monitors: Mapping[int, ClassMonitor], test_records, class_id: int) -> OutcomeCounts:
    """Tally verdict outcomes for the records predicted as `class_id`.

    Records the network routed to other classes never reach this monitor and
    are not counted.
    """
    tally = {name: 0 for name in ("tn", "fp", "mn", "fn", "tp", "mp")}
    for record in test_records:
        if record.predicted_label != class_id:
            continue
        verdict = run_monitor(monitors, record)
        nature = "negative" if record.true_label == class_id else "positive"
        tally[classify_outcome(nature, verdict)] += 1
    return OutcomeCounts(**tally)


class Metrics(NamedTuple):
    precision: float
    recall: float
    f1: float
    defined: bool


def metrics(counts: OutcomeCounts) -> Metrics:
    """Precision tp/(tp+fp), recall tp/(tp+fn+mp), and their harmonic mean.

    A zero denominator makes the affected value 0 and clears `defined`.
    """
    p_den = counts.tp + counts.fp
    r_den = counts.tp + counts.fn + counts.mp
    precision = counts.tp / p_den if p_den else 0.0
    recall = counts.tp / r_den if r_den else 0.0
    f_den = precision + recall
    f1 = 2.0 * precision * recall / f_den if f_den else 0.0
    return Metrics(precision, recall, f1, p_den > 0 and r_den > 0 and f_den > 0)


@dataclass(frozen=True)
class SweepRow:
    tau: float
    coverage_good: CoverageEstimate
    coverage_bad: CoverageEstimate
    counts: OutcomeCounts
    precision: float
    recall: float
    f1: float
    metrics_defined: bool


_FULL = CoverageEstimate(1.0, 1.0)


def sweep(
    train_records,
    test_records,
    class_id: int,
    layer_id: int,
    tau_list,
    cfg: ClusteringConfig,
    resolution: int | None = None,
) -> list[SweepRow]:
    """Build a monitor per tau, score it, and report coverage of both feature
    sets, one row per tau in the caller's order.

    Clustering work is shared across taus through one cache per feature set,
    so descending tau lists evaluate nearly incrementally. An empty feature
    set has nothing to cover and reports full coverage by convention.
    """
    tau_list = list(tau_list)
    if not tau_list:
        raise InputError("tau_list must not be empty")
    train_records = list(train_records)
    test_records = list(test_records)
    good = np.array(
        [r.features for r in train_records if r.predicted_label == class_id and r.true_label == class_id]
    )
    bad = np.array(
        [r.features for r in train_records if r.predicted_label == class_id and r.true_label != class_id]
    )
    caches = {"good": KCache(), "bad": KCache()}

    def side(points, tau, cache):
        if points.size == 0:
            return (), _FULL
        partition = kmeans_by_tau(points, dataclasses.replace(cfg, tau=tau), cache)
        boxes = tuple(box_of(block) for block in partition.blocks)
        return boxes, clustering_coverage(points, partition, resolution)

    rows = []
    for tau in tau_list:
        correct_boxes, cov_good = side(good, tau, caches["good"])
        incorrect_boxes, cov_bad = side(bad, tau, caches["bad"])
        monitor = ClassMonitor(
            class_id=class_id,
            layer_id=layer_id,
            tau_correct=float(tau),
            tau_incorrect=float(tau),
            resolution=resolution,
            correct_boxes=correct_boxes,
            incorrect_boxes=incorrect_boxes,
        )
        counts = evaluate({class_id: monitor}, test_records, class_id)
        m = metrics(counts)
        rows.append(
            SweepRow(
                tau=float(tau),
                coverage_good=cov_good,
                coverage_bad=cov_bad,
                counts=counts,
                precision=m.precision,
                recall=m.recall,
                f1=m.f1,
                metrics_defined=m.defined,
            )
        )
    return rows
