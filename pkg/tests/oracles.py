"""Independent brute-force reference implementations used by the test suite.

Everything here is deliberately slow and loop-based so it shares no code path
with the library under test.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def cell_edges(lo: float, hi: float, resolution: int) -> list[float]:
    """Edge positions of `resolution` equal subdivisions of [lo, hi].

    The outermost edges are pinned to the exact bounds so the cells tile the
    interval even when the float arithmetic of the interior edges drifts.
    """
    width = hi - lo
    edges = [lo + width * j / resolution for j in range(resolution + 1)]
    edges[0], edges[-1] = lo, hi
    return edges


def enum_cell_count(global_intervals, sub_intervals, resolution: int) -> int:
    """Count covered cells by checking every cell of every non-degenerate dimension.

    A cell j (1-based) spans (edge[j-1], edge[j]], with cell 1 additionally
    closed at the global lower bound: the ceil-based index arithmetic assigns a
    value sitting exactly on an interior edge to the cell on its left.
    """
    count = 1
    for (a, b), (sa, sb) in zip(global_intervals, sub_intervals):
        if a == b:
            continue
        edges = cell_edges(a, b, resolution)
        n = 0
        for j in range(1, resolution + 1):
            left, right = edges[j - 1], edges[j]
            # closed sub-interval [sa, sb] meets (left, right] (cell 1: [left, right])
            if j == 1:
                hit = sb >= left and sa <= right
            else:
                hit = sb > left and sa <= right
            if hit:
                n += 1
        count *= n
    return count


def bruteforce_union_coverage(global_intervals, boxes, resolution: int) -> float:
    """Exact fraction of closed grid cells meeting at least one box, cell by cell.

    Independent counterpart of the library's exact-coverage oracle: iterates the
    full cartesian cell grid and tests closed-interval overlap per dimension.
    """
    kept = [i for i, (a, b) in enumerate(global_intervals) if a != b]
    if not kept:
        return 1.0 if boxes else 0.0
    per_dim_edges = {i: cell_edges(*global_intervals[i], resolution) for i in kept}
    total = resolution ** len(kept)
    covered = 0
    for cell in itertools.product(range(1, resolution + 1), repeat=len(kept)):
        hit = False
        for box in boxes:
            ok = True
            for axis, j in zip(kept, cell):
                left = per_dim_edges[axis][j - 1]
                right = per_dim_edges[axis][j]
                sa, sb = box[axis]
                if sb < left or sa > right:
                    ok = False
                    break
            if ok:
                hit = True
                break
        if hit:
            covered += 1
    return covered / total


def inertia_of(points: np.ndarray, labels) -> float:
    """Within-cluster sum of squared distances to block means."""
    points = np.asarray(points, dtype=float)
    labels = np.asarray(labels)
    total = 0.0
    for lab in np.unique(labels):
        block = points[labels == lab]
        total += float(((block - block.mean(axis=0)) ** 2).sum())
    return total


def best_partition_inertia(points: np.ndarray, k: int) -> float:
    """Globally optimal k-partition inertia by exhaustive assignment search."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    best = math.inf
    for assignment in itertools.product(range(k), repeat=n):
        if len(set(assignment)) != k:
            continue
        best = min(best, inertia_of(points, assignment))
    return best
