"""Resolution-grid coverage of boxes.

The covered space of a box drops its zero-width dimensions and subdivides each
remaining one into `resolution` cells. Cell indices for a value x in a global
interval [a, b] come from index(x) = max(1, ceil(resolution * (x - a) / (b - a))),
clamped to [1, resolution]; values within a relative 1e-12 of an exact cell edge
snap to that edge first, so accumulated float error cannot push a bound into the
neighbouring cell. Under this arithmetic a cell behaves as (left, right], with
the first cell closed at the global lower bound.

Cell counts and totals are kept as Python integers: a 10-dimensional grid at
resolution 200 has 200**10 cells, far beyond an int64.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InputError,
    InternalError,
    InvalidPartition,
    NotASubBox,
    TooManyCells,
)
from .geometry import Box, box_of, is_subbox
from .validation import as_points

_EDGE_SNAP = 1e-12


@dataclass(frozen=True)
class CoveredSpace:
    """A box restricted to its non-degenerate dimensions (original indices kept)."""

    base: Box
    kept_dims: tuple[int, ...]

    @property
    def effective_dim(self) -> int:
        return len(self.kept_dims)


@dataclass(frozen=True)
class ResolutionGrid:
    space: CoveredSpace
    resolution: int

    def __post_init__(self):
        if int(self.resolution) != self.resolution or self.resolution < 1:
            raise InputError(f"resolution must be a positive integer, got {self.resolution}")
        object.__setattr__(self, "resolution", int(self.resolution))

    @property
    def total_cells(self) -> int:
        return self.resolution ** self.space.effective_dim


@dataclass(frozen=True)
class CoverageEstimate:
    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise InternalError(
                f"coverage bounds out of order: ({self.lower}, {self.upper})"
            )


def covered_space(box: Box) -> CoveredSpace:
    kept = tuple(i for i in range(box.dim) if not box.is_degenerate(i))
    return CoveredSpace(box, kept)


def _cell_index(x: float, lo: float, hi: float, resolution: int) -> int:
    t = resolution * (x - lo) / (hi - lo)
    nearest = round(t)
    if abs(t - nearest) <= _EDGE_SNAP * max(1.0, abs(t)):
        t = nearest
    return min(resolution, max(1, math.ceil(t)))


def covered_cell_ranges(grid: ResolutionGrid, sub: Box) -> tuple[tuple[int, int], ...]:
    """Inclusive 1-based cell index range of `sub` per kept dimension."""
    base = grid.space.base
    if sub.dim != base.dim:
        raise DimensionMismatch(
            f"sub-box dimension {sub.dim} differs from space dimension {base.dim}"
        )
    if not is_subbox(sub, base):
        raise NotASubBox(f"{sub.intervals} is not inside {base.intervals}")
    ranges = []
    for d in grid.space.kept_dims:
        lo, hi = base.intervals[d]
        slo, shi = sub.intervals[d]
        ranges.append(
            (
                _cell_index(slo, lo, hi, grid.resolution),
                _cell_index(shi, lo, hi, grid.resolution),
            )
        )
    return tuple(ranges)


def covered_cell_count(grid: ResolutionGrid, sub: Box) -> int:
    count = 1
    for lo_idx, hi_idx in covered_cell_ranges(grid, sub):
        count *= hi_idx - lo_idx + 1
    return count


def subbox_coverage(grid: ResolutionGrid, sub: Box) -> float:
    return covered_cell_count(grid, sub) / grid.total_cells


def boxes_coverage(grid: ResolutionGrid, boxes) -> CoverageEstimate:
    """Coverage bounds for a union of sub-boxes.

    Upper bound: clamped sum of per-box covered-cell counts. Lower bound:
    upper minus the pairwise covered-cell overlaps (Bonferroni); overlaps are
    intersections of cell index ranges, which also catches disjoint boxes that
    land in the same cell.
    """
    ranges = [covered_cell_ranges(grid, b) for b in boxes]
    total = grid.total_cells
    summed = 0
    for r in ranges:
        count = 1
        for lo_idx, hi_idx in r:
            count *= hi_idx - lo_idx + 1
        summed += count
    overlap = 0
    for i in range(len(ranges)):
        for j in range(i + 1, len(ranges)):
            shared = 1
            for (alo, ahi), (blo, bhi) in zip(ranges[i], ranges[j]):
                width = min(ahi, bhi) - max(alo, blo) + 1
                if width <= 0:
                    shared = 0
                    break
                shared *= width
            overlap += shared
    # one exact integer division per bound: dividing both integer numerators
    # by the same total preserves their ordering through rounding, which a
    # float subtraction would not
    upper_cells = min(summed, total)
    lower_cells = max(0, upper_cells - overlap)
    return CoverageEstimate(lower_cells / total, upper_cells / total)


def _partition_blocks(partition):
    blocks = getattr(partition, "blocks", partition)
    return [as_points(b, allow_empty=True) for b in blocks]


def _check_partition(points: np.ndarray, blocks) -> None:
    if not blocks:
        raise InvalidPartition("partition has no blocks")
    for i, b in enumerate(blocks):
        if b.shape[0] == 0:
            raise InvalidPartition(f"block {i} is empty")
        if b.shape[1] != points.shape[1]:
            raise DimensionMismatch(
                f"block {i} has dimension {b.shape[1]}, points have {points.shape[1]}"
            )
    want = Counter(map(tuple, points.tolist()))
    got = Counter()
    for b in blocks:
        got.update(map(tuple, b.tolist()))
    if want != got:
        raise InvalidPartition("blocks do not partition the point set")


def _grid_for(points: np.ndarray, resolution: int | None) -> ResolutionGrid:
    if resolution is None:
        resolution = points.shape[0]
    return ResolutionGrid(covered_space(box_of(points)), resolution)


def clustering_coverage(points, partition, resolution: int | None = None) -> CoverageEstimate:
    """Coverage bounds of the union of tight boxes over the partition's blocks.

    The grid is built on the tight box of all points at `resolution`
    subdivisions per non-degenerate dimension (default: the point count).
    """
    pts = as_points(points)
    blocks = _partition_blocks(partition)
    _check_partition(pts, blocks)
    grid = _grid_for(pts, resolution)
    return boxes_coverage(grid, [box_of(b) for b in blocks])


def exact_coverage_oracle(
    points,
    partition,
    resolution: int | None = None,
    max_cells: int = 10**7,
) -> float:
    """Exact fraction of grid cells whose closed cell box meets some block box.

    Enumerates every cell, so it refuses grids above `max_cells` cells. Meant
    as a reference value for sandwiching the clustering_coverage bounds.
    """
    pts = as_points(points)
    blocks = _partition_blocks(partition)
    _check_partition(pts, blocks)
    grid = _grid_for(pts, resolution)
    space = grid.space
    eff = space.effective_dim
    if eff == 0:
        return 1.0
    res = grid.resolution
    if grid.total_cells > max_cells:
        raise TooManyCells(f"{grid.total_cells} cells exceed the {max_cells} cap")
    covered = np.zeros((res,) * eff, dtype=bool)
    for block in blocks:
        box = box_of(block)
        slices = []
        for d in space.kept_dims:
            lo, hi = space.base.intervals[d]
            edges = lo + (hi - lo) * np.arange(res + 1) / res
            # the outermost edges must hit the bounds exactly or corner points
            # fall outside every cell
            edges[0], edges[-1] = lo, hi
            sa, sb = box.intervals[d]
            jlo = int(np.searchsorted(edges[1:], sa, side="left")) + 1
            jhi = int(np.searchsorted(edges[:-1], sb, side="right"))
            slices.append(slice(jlo - 1, jhi))
        covered[tuple(slices)] = True
    return float(covered.sum() / grid.total_cells)
