"""Cluster-count selection by inertia improvement, with warm-start caching
and bisection searches for the useful range of the threshold tau.

All randomness flows from one seed: run r of the k-cluster problem draws its
generator from the stream (seed, k, r), so results are reproducible bit for
bit regardless of evaluation order, and a best-of-`restarts` rule with
strictly-smaller comparison picks the winner deterministically.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .coverage import CoverageEstimate, clustering_coverage
from .errors import EmptyPointSet, InputError, KTooLarge
from .validation import as_points


@dataclass(frozen=True)
class ClusteringConfig:
    tau: float
    seed: int = 42
    restarts: int = 10
    max_iter: int = 300
    center_tol: float = 1e-6

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise InputError(f"tau must be in [0, 1], got {self.tau}")
        if self.seed < 0 or int(self.seed) != self.seed:
            raise InputError(f"seed must be a non-negative integer, got {self.seed}")
        if self.restarts < 1:
            raise InputError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iter < 1:
            raise InputError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.center_tol > 0:
            raise InputError(f"center_tol must be positive, got {self.center_tol}")


@dataclass(frozen=True)
class TuneConfig:
    eps_cov: float = 0.01
    eps_ival: float = 1 / 64

    def __post_init__(self):
        if not self.eps_cov > 0:
            raise InputError(f"eps_cov must be positive, got {self.eps_cov}")
        if not 0.0 < self.eps_ival < 1.0:
            raise InputError(f"eps_ival must be in (0, 1), got {self.eps_ival}")


@dataclass(frozen=True)
class Partition:
    """A clustering of a point set: labels index into centers, blocks are the
    induced point subsets, and inertia is recomputable from blocks and centers."""

    points: np.ndarray
    labels: np.ndarray
    centers: np.ndarray
    inertia: float

    @property
    def k(self) -> int:
        return len(self.centers)

    @property
    def blocks(self) -> list[np.ndarray]:
        return [self.points[self.labels == j] for j in range(self.k)]


class KCache:
    """Memo of tau -> chosen k for one (point set, config) pair, plus the
    fixed-k partitions already computed along the way.

    Reuse only with the same points and the same config apart from tau;
    nothing here re-validates that.
    """

    def __init__(self):
        self.taus: dict[float, int] = {}
        self._partitions: dict[int, Partition] = {}

    def warm_start_k(self, tau: float) -> int:
        """Starting k for the upward scan: the k cached for the smallest
        tau' >= tau. Such a tau' selected at most k(tau) clusters, so the scan
        can only move up from there; caching in descending tau order makes
        sweeps nearly incremental."""
        above = [t for t in self.taus if t >= tau]
        return self.taus[min(above)] if above else 1

    def record(self, tau: float, k: int) -> None:
        self.taus[tau] = k

    def partition(self, k: int, compute) -> Partition:
        got = self._partitions.get(k)
        if got is None:
            got = compute(k)
            self._partitions[k] = got
        return got


def _distinct_count(X: np.ndarray) -> int:
    return len({tuple(row) for row in X.tolist()})


def _kmeanspp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[int(rng.integers(n))]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        centers[j] = X[int(rng.choice(n, p=d2 / d2.sum()))]
        d2 = np.minimum(d2, ((X - centers[j]) ** 2).sum(axis=1))
    return centers


def _fix_empty(X, d2, labels, counts):
    """Move the farthest-from-its-center point into each empty cluster,
    never emptying another cluster; ties break to the lowest point index."""
    k = len(counts)
    assigned = d2[np.arange(len(labels)), labels].copy()
    for j in range(k):
        if counts[j] > 0:
            continue
        candidates = np.where(counts[labels] > 1, assigned, -np.inf)
        i = int(candidates.argmax())
        counts[labels[i]] -= 1
        labels[i] = j
        counts[j] = 1
        assigned[i] = -np.inf
    return labels


def _lloyd(X: np.ndarray, centers: np.ndarray, cfg: ClusteringConfig):
    k = centers.shape[0]
    scale = float(X.var(axis=0).sum())
    threshold = cfg.center_tol * scale
    labels = np.zeros(X.shape[0], dtype=np.int64)
    for _ in range(cfg.max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1)
        labels = d2.argmin(axis=1)
        counts = np.bincount(labels, minlength=k)
        if (counts == 0).any():
            labels = _fix_empty(X, d2, labels, counts)
        new_centers = np.stack([X[labels == j].mean(axis=0) for j in range(k)])
        shift = float(((new_centers - centers) ** 2).sum())
        centers = new_centers
        if shift <= threshold:
            break
    inertia = float(((X - centers[labels]) ** 2).sum())
    return labels, centers, inertia


def kmeans_fixed_k(points, k: int, cfg: ClusteringConfig) -> Partition:
    """Best-inertia result of `cfg.restarts` k-means++-seeded Lloyd runs."""
    X = as_points(points)
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    distinct = _distinct_count(X)
    if k > distinct:
        raise KTooLarge(f"k={k} exceeds the {distinct} distinct points")
    if k == distinct:
        # every distinct value becomes its own block, in first-seen order
        index_of: dict[tuple, int] = {}
        labels = np.empty(X.shape[0], dtype=np.int64)
        for i, row in enumerate(map(tuple, X.tolist())):
            labels[i] = index_of.setdefault(row, len(index_of))
        centers = np.array(list(index_of.keys()), dtype=np.float64)
        return Partition(X.copy(), labels, centers, 0.0)
    if k == 1:
        labels = np.zeros(X.shape[0], dtype=np.int64)
        center = X.mean(axis=0, keepdims=True)
        return Partition(X.copy(), labels, center, float(((X - center) ** 2).sum()))
    best = None
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, k, r])
        seeds = _kmeanspp(X, k, rng)
        labels, centers, inertia = _lloyd(X, seeds, cfg)
        if best is None or inertia < best[2]:
            best = (labels, centers, inertia)
    return Partition(X.copy(), best[0], best[1], best[2])


def kmeans_by_tau(points, cfg: ClusteringConfig, cache: KCache | None = None) -> Partition:
    """Scan k upward and stop at the first k whose improvement
    1 - inertia(k+1)/inertia(k) falls below tau.

    tau >= 1 short-circuits to the single-cluster partition (no split can
    strictly beat an improvement of 1). The scan also stops at zero inertia
    and at k = number of distinct points, where no further split exists.
    """
    X = as_points(points)
    if X.shape[0] == 0:
        raise EmptyPointSet("cannot cluster an empty point set")

    def fixed(k: int) -> Partition:
        if cache is not None:
            return cache.partition(k, lambda kk=k: kmeans_fixed_k(X, kk, cfg))
        return kmeans_fixed_k(X, k, cfg)

    if cfg.tau >= 1.0:
        result = fixed(1)
        if cache is not None:
            cache.record(cfg.tau, 1)
        return result
    distinct = _distinct_count(X)
    k = min(cache.warm_start_k(cfg.tau), distinct) if cache is not None else 1
    current = fixed(k)
    while current.inertia > 0.0 and k < distinct:
        nxt = fixed(k + 1)
        improvement = 1.0 - nxt.inertia / current.inertia
        if improvement < cfg.tau:
            break
        k += 1
        current = nxt
    if cache is not None:
        cache.record(cfg.tau, k)
    return current


def mean_coverage_at_tau(points, tau, cfg: ClusteringConfig, cache: KCache | None = None) -> float:
    """Midpoint of the coverage bounds of the tau-selected partition."""
    partition = kmeans_by_tau(points, dataclasses.replace(cfg, tau=tau), cache)
    estimate: CoverageEstimate = clustering_coverage(points, partition)
    return (estimate.lower + estimate.upper) / 2.0


@dataclass(frozen=True)
class TauSearchResult:
    """Bisection outcome: `value` is the located threshold, `trace` lists each
    probed midpoint with its mean coverage, `baseline` the loop-invariant
    reference coverage."""

    value: float
    trace: tuple[tuple[float, float], ...]
    baseline: float


def search_tau_max(points, tune: TuneConfig, cfg: ClusteringConfig, cache: KCache | None = None) -> TauSearchResult:
    """Largest useful tau: bisect [0, 1] against the tau=1 coverage baseline.

    A midpoint whose mean coverage sits more than eps_cov below the baseline
    moves the lower end up, otherwise the upper end comes down; the upper end
    is returned once the bracket is no longer than eps_ival, taking exactly
    ceil(log2(1/eps_ival)) steps.
    """
    cache = KCache() if cache is None else cache
    baseline = mean_coverage_at_tau(points, 1.0, cfg, cache)
    lo, hi = 0.0, 1.0
    trace = []
    while hi - lo > tune.eps_ival:
        mid = (lo + hi) / 2.0
        cov = mean_coverage_at_tau(points, mid, cfg, cache)
        trace.append((mid, cov))
        if baseline - cov > tune.eps_cov:
            lo = mid
        else:
            hi = mid
    return TauSearchResult(hi, tuple(trace), baseline)


def search_tau_min(points, tune: TuneConfig, cfg: ClusteringConfig, cache: KCache | None = None) -> TauSearchResult:
    """Smallest useful tau: mirror search against the tau=0 coverage baseline,
    with the branch assignments inverted; returns the lower bracket end."""
    cache = KCache() if cache is None else cache
    baseline = mean_coverage_at_tau(points, 0.0, cfg, cache)
    lo, hi = 0.0, 1.0
    trace = []
    while hi - lo > tune.eps_ival:
        mid = (lo + hi) / 2.0
        cov = mean_coverage_at_tau(points, mid, cfg, cache)
        trace.append((mid, cov))
        if cov - baseline > tune.eps_cov:
            hi = mid
        else:
            lo = mid
    return TauSearchResult(lo, tuple(trace), baseline)


class TauKMeans(ClusterMixin, BaseEstimator):
    """Clusterer that picks k by the inertia-improvement threshold tau."""

    def __init__(self, tau=0.5, seed=42, restarts=10, max_iter=300, center_tol=1e-6):
        self.tau = tau
        self.seed = seed
        self.restarts = restarts
        self.max_iter = max_iter
        self.center_tol = center_tol

    def _config(self) -> ClusteringConfig:
        return ClusteringConfig(
            tau=self.tau,
            seed=self.seed,
            restarts=self.restarts,
            max_iter=self.max_iter,
            center_tol=self.center_tol,
        )

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        partition = kmeans_by_tau(X, self._config())
        self.partition_ = partition
        self.labels_ = partition.labels
        self.cluster_centers_ = partition.centers
        self.inertia_ = partition.inertia
        self.n_clusters_ = partition.k
        return self

    def predict(self, X):
        check_is_fitted(self, "cluster_centers_")
        X = check_array(X, dtype=np.float64)
        d2 = ((X[:, None, :] - self.cluster_centers_[None, :, :]) ** 2).sum(axis=-1)
        return d2.argmin(axis=1)
