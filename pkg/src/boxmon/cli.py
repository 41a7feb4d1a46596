"""Command-line front end.

Subcommands: build (monitors from a training feature file), run (verdicts for
a test file), coverage (coverage bounds per tau), tune (bisection search for
the useful tau range), eval (full sweep CSV). Exit codes: 0 success, 2 bad
input, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .clustering import (
    ClusteringConfig,
    KCache,
    TuneConfig,
    kmeans_by_tau,
    search_tau_max,
    search_tau_min,
)
from .coverage import (
    CoverageEstimate,
    ResolutionGrid,
    boxes_coverage,
    clustering_coverage,
    covered_space,
)
from .errors import InputError, InternalError
from .evaluation import SweepRow, evaluate, metrics, sweep
from .geometry import Box
from .io import (
    atomic_write,
    coverage_csv_text,
    fmt,
    read_feature_file,
    sweep_csv_text,
    verdict_csv_text,
)
from .monitor import build_class_monitor, deserialize_monitor, run_monitor, serialize_monitor

_FULL = CoverageEstimate(1.0, 1.0)


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise InputError(f"{flag} expects comma-separated integers, got {text!r}") from None
    if not values:
        raise InputError(f"{flag} is empty")
    return values


def _parse_tau_list(text: str) -> list[float]:
    """Comma-separated taus, deduplicated and processed in descending order."""
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise InputError(f"--tau expects comma-separated numbers, got {text!r}") from None
    if not values:
        raise InputError("--tau is empty")
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise InputError(f"--tau values must be in [0, 1], got {v}")
    return sorted(set(values), reverse=True)


def _config(seed: int) -> ClusteringConfig:
    return ClusteringConfig(tau=0.5, seed=seed)


def _load_records(path, *, required_nonempty=True):
    fs = read_feature_file(path)
    if required_nonempty and fs.n_records == 0:
        raise InputError(f"{path}: feature file has no rows")
    return fs, list(fs.records())


def _read_monitor_file(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return deserialize_monitor(text)


def _split_class(records, class_id):
    good = [r.features for r in records if r.predicted_label == class_id and r.true_label == class_id]
    bad = [r.features for r in records if r.predicted_label == class_id and r.true_label != class_id]
    return good, bad


def _emit(text: str, out) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def cmd_build(args) -> int:
    fs, records = _load_records(args.train)
    class_ids = _parse_int_list(args.class_ids, "--class") if args.class_ids else fs.classes()
    if not class_ids:
        raise InputError(f"{args.train}: no classes found")
    cfg = _config(args.seed)
    monitors = {}
    for y in sorted(set(class_ids)):
        monitors[y] = build_class_monitor(
            records, y, args.layer, args.tau_correct, args.tau_incorrect,
            cfg, resolution=args.resolution,
        )
    atomic_write(args.out, serialize_monitor(monitors) + "\n")
    for y in sorted(monitors):
        m = monitors[y]
        print(
            f"class {y}: correct_clusters={len(m.correct_boxes)} "
            f"correct_boxes={len(m.correct_boxes)} "
            f"incorrect_clusters={len(m.incorrect_boxes)} "
            f"incorrect_boxes={len(m.incorrect_boxes)}"
        )
    return 0


def cmd_run(args) -> int:
    monitors = _read_monitor_file(args.monitor)
    fs, records = _load_records(args.test, required_nonempty=False)
    rows = []
    totals = {"accept": 0, "reject": 0, "uncertainty": 0, "unknown": 0}
    for i, record in enumerate(records, start=1):
        if record.predicted_label in monitors:
            verdict = run_monitor(monitors, record).value
        else:
            verdict = "unknown"
            print(
                f"warning: row {i}: no monitor for predicted class {record.predicted_label}",
                file=sys.stderr,
            )
        totals[verdict] += 1
        rows.append((i, record.predicted_label, verdict))
    atomic_write(args.out, verdict_csv_text(rows, args.seed))
    print(
        "accept={accept} reject={reject} uncertainty={uncertainty} unknown={unknown}".format(**totals),
        file=sys.stderr,
    )
    return 0


def cmd_coverage(args) -> int:
    fs, records = _load_records(args.train)
    good, bad = _split_class(records, args.class_id)
    if not good and not bad:
        raise InputError(f"class {args.class_id} has no feature rows in {args.train}")
    cfg = _config(args.seed)
    caches = {"good": KCache(), "bad": KCache()}
    rows = []
    for tau in _parse_tau_list(args.tau):
        for name, points in (("good", good), ("bad", bad)):
            if not points:
                rows.append((tau, name, _FULL))
                continue
            partition = kmeans_by_tau(points, dataclasses.replace(cfg, tau=tau), caches[name])
            rows.append((tau, name, clustering_coverage(points, partition, args.resolution)))
    _emit(coverage_csv_text(rows, args.seed), args.out)
    return 0


def cmd_tune(args) -> int:
    fs, records = _load_records(args.train)
    good, _ = _split_class(records, args.class_id)
    if not good:
        raise InputError(
            f"class {args.class_id} has no correctly classified rows in {args.train} to tune on"
        )
    tune = TuneConfig(eps_cov=args.eps_cov, eps_ival=args.eps_ival)
    cfg = _config(args.seed)
    cache = KCache()
    low = search_tau_min(good, tune, cfg, cache)
    high = search_tau_max(good, tune, cfg, cache)
    print(f"tau_min={fmt(low.value)}")
    print(f"tau_max={fmt(high.value)}")
    if args.out:
        doc = {
            "seed": args.seed,
            "class": args.class_id,
            "eps_cov": args.eps_cov,
            "eps_ival": args.eps_ival,
            "tau_min": {
                "value": low.value,
                "baseline": low.baseline,
                "trace": [[t, c] for t, c in low.trace],
            },
            "tau_max": {
                "value": high.value,
                "baseline": high.baseline,
                "trace": [[t, c] for t, c in high.trace],
            },
        }
        atomic_write(args.out, json.dumps(doc, indent=2) + "\n")
    return 0


def _envelope_coverage(boxes, resolution) -> CoverageEstimate:
    """Coverage of a box set against the grid over its own envelope."""
    if not boxes:
        return _FULL
    lows = [min(b.intervals[d][0] for b in boxes) for d in range(boxes[0].dim)]
    highs = [max(b.intervals[d][1] for b in boxes) for d in range(boxes[0].dim)]
    env = Box(tuple(zip(lows, highs)))
    grid = ResolutionGrid(covered_space(env), resolution)
    return boxes_coverage(grid, list(boxes))


def cmd_eval(args) -> int:
    if args.monitor and args.tau:
        raise InputError("choose either --monitor or --tau, not both")
    fs_test, test_records = _load_records(args.test, required_nonempty=False)
    if args.monitor:
        monitors = _read_monitor_file(args.monitor)
        if args.class_id not in monitors:
            raise InputError(f"{args.monitor} has no monitor for class {args.class_id}")
        m = monitors[args.class_id]
        resolution = m.resolution if m.resolution is not None else args.resolution
        if resolution is None:
            raise InputError("monitor file stores no resolution; pass --resolution")
        counts = evaluate(monitors, test_records, args.class_id)
        quality = metrics(counts)
        rows = [
            SweepRow(
                tau=m.tau_correct,
                coverage_good=_envelope_coverage(m.correct_boxes, resolution),
                coverage_bad=_envelope_coverage(m.incorrect_boxes, resolution),
                counts=counts,
                precision=quality.precision,
                recall=quality.recall,
                f1=quality.f1,
                metrics_defined=quality.defined,
            )
        ]
    else:
        if not args.train:
            raise InputError("--train is required unless --monitor is given")
        if not args.tau:
            raise InputError("--tau is required unless --monitor is given")
        fs_train, train_records = _load_records(args.train)
        rows = sweep(
            train_records,
            test_records,
            args.class_id,
            args.layer,
            _parse_tau_list(args.tau),
            _config(args.seed),
            args.resolution,
        )
    _emit(sweep_csv_text(rows, args.seed), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxmon",
        description="Box-abstraction runtime monitors over network features.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build monitors from a training feature file")
    p.add_argument("--train", required=True, help="training feature CSV")
    p.add_argument("--class", dest="class_ids", default=None,
                   help="comma-separated class ids (default: all classes in the file)")
    p.add_argument("--layer", type=int, default=0, help="layer id recorded in the monitor file")
    p.add_argument("--tau-correct", type=float, default=0.8)
    p.add_argument("--tau-incorrect", type=float, default=0.8)
    p.add_argument("--resolution", type=int, default=None,
                   help="grid resolution recorded in the monitor file")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="monitor JSON output path")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("run", help="verdicts for a test feature file")
    p.add_argument("--monitor", required=True, help="monitor JSON file")
    p.add_argument("--test", required=True, help="test feature CSV")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="verdict CSV output path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("coverage", help="coverage bounds per tau for one class")
    p.add_argument("--train", required=True)
    p.add_argument("--class", dest="class_id", type=int, required=True)
    p.add_argument("--tau", required=True, help="comma-separated taus, processed descending")
    p.add_argument("--resolution", type=int, default=None)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None, help="coverage CSV path (default: stdout)")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("tune", help="bisection search for the useful tau range")
    p.add_argument("--train", required=True)
    p.add_argument("--class", dest="class_id", type=int, required=True)
    p.add_argument("--eps-cov", type=float, default=0.01)
    p.add_argument("--eps-ival", type=float, default=1 / 64)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None, help="trace JSON path (optional)")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("eval", help="sweep CSV for one class")
    p.add_argument("--train", default=None, help="training feature CSV (tau-sweep mode)")
    p.add_argument("--monitor", default=None, help="monitor JSON (single-row mode)")
    p.add_argument("--test", required=True)
    p.add_argument("--class", dest="class_id", type=int, required=True)
    p.add_argument("--layer", type=int, default=0)
    p.add_argument("--tau", default=None, help="comma-separated taus, processed descending")
    p.add_argument("--resolution", type=int, default=None)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None, help="sweep CSV path (default: stdout)")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # anything unexpected is an invariant violation
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    main()
