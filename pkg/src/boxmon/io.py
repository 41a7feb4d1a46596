"""Feature-file parsing and the CSV output formats.

Feature files are headerless UTF-8 CSV with columns
``true_label,predicted_label,f_1,...,f_n``. A true label of -1 marks inputs
from outside the known classes. Blank lines and lines starting with '#' are
skipped. All output files are written atomically (temp file + rename) and
start with a ``# seed=N`` comment; floats are printed with 9 significant
digits.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import FeatureFileError
from .monitor import FeatureRecord


@dataclass(frozen=True)
class FeatureSet:
    """Columnar view of one feature file."""

    features: np.ndarray
    true_labels: np.ndarray
    predicted_labels: np.ndarray

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        if feats.ndim != 2:
            raise FeatureFileError(f"features must be 2-d, got shape {feats.shape}")
        true = np.asarray(self.true_labels, dtype=np.int64)
        pred = np.asarray(self.predicted_labels, dtype=np.int64)
        n = feats.shape[0]
        if true.shape != (n,) or pred.shape != (n,):
            raise FeatureFileError("label arrays must have one entry per feature row")
        if feats.size and not np.isfinite(feats).all():
            raise FeatureFileError("features contain non-finite values")
        if n and (true < -1).any():
            raise FeatureFileError("true labels must be >= -1")
        if n and (pred < 0).any():
            raise FeatureFileError("predicted labels must be >= 0")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "true_labels", true)
        object.__setattr__(self, "predicted_labels", pred)

    @property
    def n_records(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def class_count(self) -> int:
        """One past the largest class id present in either label column."""
        if self.n_records == 0:
            return 0
        return int(max(self.true_labels.max(), self.predicted_labels.max())) + 1

    def records(self) -> Iterator[FeatureRecord]:
        for f, t, p in zip(self.features, self.true_labels, self.predicted_labels):
            yield FeatureRecord(tuple(f), int(t), int(p))

    def classes(self) -> list[int]:
        """Class ids present in the file, ascending; -1 is not a class."""
        ids = set(self.true_labels.tolist()) | set(self.predicted_labels.tolist())
        return sorted(y for y in ids if y >= 0)


def read_feature_file(path) -> FeatureSet:
    """Parse a feature CSV; every defect is reported with its 1-based row."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FeatureFileError(f"cannot read {path}: {exc}") from None
    features: list[list[float]] = []
    true_labels: list[int] = []
    pred_labels: list[int] = []
    dim = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(",")
        if len(fields) < 3:
            raise FeatureFileError(
                f"{path}: row {lineno}: expected true_label,predicted_label and at "
                f"least one feature, got {len(fields)} column(s)"
            )
        try:
            true = int(fields[0])
            pred = int(fields[1])
        except ValueError:
            raise FeatureFileError(
                f"{path}: row {lineno}: labels must be integers, got "
                f"{fields[0]!r},{fields[1]!r}"
            ) from None
        if true < -1:
            raise FeatureFileError(f"{path}: row {lineno}: true label must be >= -1, got {true}")
        if pred < 0:
            raise FeatureFileError(f"{path}: row {lineno}: predicted label must be >= 0, got {pred}")
        row_dim = len(fields) - 2
        if dim is None:
            dim = row_dim
        elif row_dim != dim:
            raise FeatureFileError(
                f"{path}: row {lineno}: expected {dim} feature column(s), got {row_dim}"
            )
        try:
            values = [float(v) for v in fields[2:]]
        except ValueError as exc:
            raise FeatureFileError(f"{path}: row {lineno}: bad feature value: {exc}") from None
        if not all(math.isfinite(v) for v in values):
            raise FeatureFileError(f"{path}: row {lineno}: features must be finite")
        features.append(values)
        true_labels.append(true)
        pred_labels.append(pred)
    arr = np.array(features, dtype=np.float64) if features else np.empty((0, 0))
    return FeatureSet(arr, np.array(true_labels, dtype=np.int64), np.array(pred_labels, dtype=np.int64))


def write_feature_file(path, feature_set: FeatureSet) -> None:
    lines = []
    for r in feature_set.records():
        lines.append(",".join([str(r.true_label), str(r.predicted_label)] + [repr(v) for v in r.features]))
    atomic_write(path, "".join(line + "\n" for line in lines))


def atomic_write(path, text: str) -> None:
    """Write text so the target never holds a partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def fmt(value: float) -> str:
    """Floats with 9 significant digits, matching the CSV contracts."""
    return "%.9g" % float(value)


SWEEP_HEADER = (
    "tau,cov_lo_good,cov_hi_good,cov_lo_bad,cov_hi_bad,"
    "tn,fp,mn,fn,tp,mp,precision,recall,f1,metrics_defined"
)


def sweep_csv_text(rows, seed: int) -> str:
    lines = [f"# seed={seed}", SWEEP_HEADER]
    for r in rows:
        c = r.counts
        lines.append(
            ",".join(
                [
                    fmt(r.tau),
                    fmt(r.coverage_good.lower),
                    fmt(r.coverage_good.upper),
                    fmt(r.coverage_bad.lower),
                    fmt(r.coverage_bad.upper),
                    str(c.tn),
                    str(c.fp),
                    str(c.mn),
                    str(c.fn),
                    str(c.tp),
                    str(c.mp),
                    fmt(r.precision),
                    fmt(r.recall),
                    fmt(r.f1),
                    "1" if r.metrics_defined else "0",
                ]
            )
        )
    return "".join(line + "\n" for line in lines)


def write_sweep_csv(path, rows, seed: int) -> None:
    atomic_write(path, sweep_csv_text(rows, seed))


COVERAGE_HEADER = "tau,set,cov_lo,cov_hi,rel_diff"


def rel_diff(lower: float, upper: float) -> float:
    """Bound gap relative to the upper bound; 0 when the upper bound is 0."""
    return (upper - lower) / upper if upper > 0 else 0.0


def coverage_csv_text(rows, seed: int) -> str:
    """Rows are (tau, set_name, CoverageEstimate) triples."""
    lines = [f"# seed={seed}", COVERAGE_HEADER]
    for tau, name, est in rows:
        lines.append(
            ",".join(
                [fmt(tau), name, fmt(est.lower), fmt(est.upper), fmt(rel_diff(est.lower, est.upper))]
            )
        )
    return "".join(line + "\n" for line in lines)


VERDICT_HEADER = "row,predicted,verdict"


def verdict_csv_text(rows, seed: int) -> str:
    """Rows are (1-based input row, predicted label, verdict string) triples."""
    lines = [f"# seed={seed}", VERDICT_HEADER]
    for row, predicted, verdict in rows:
        lines.append(f"{row},{predicted},{verdict}")
    return "".join(line + "\n" for line in lines)
