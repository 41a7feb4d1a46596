"""Axis-aligned boxes over feature space: tight hulls, membership, intersection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .validation import as_points, as_vector


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box: one (lower, upper) interval per dimension."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        norm = []
        for i, pair in enumerate(self.intervals):
            lo, hi = float(pair[0]), float(pair[1])
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise ValueError(f"dimension {i}: non-finite bound ({lo}, {hi})")
            if lo > hi:
                raise ValueError(f"dimension {i}: lower bound {lo} exceeds upper {hi}")
            norm.append((lo, hi))
        object.__setattr__(self, "intervals", tuple(norm))

    @property
    def dim(self) -> int:
        return len(self.intervals)

    @property
    def lows(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.intervals])

    @property
    def highs(self) -> np.ndarray:
        return np.array([hi for _, hi in self.intervals])

    def is_degenerate(self, i: int) -> bool:
        lo, hi = self.intervals[i]
        return lo == hi

    def contains(self, point) -> bool:
        v = as_vector(point, dim=self.dim)
        return all(lo <= x <= hi for x, (lo, hi) in zip(v, self.intervals))


def box_of(points) -> Box:
    """Tight box of a non-empty point set: per-dimension [min, max]."""
    arr = as_points(points)
    return Box(tuple(zip(arr.min(axis=0).tolist(), arr.max(axis=0).tolist())))


def contains(box: Box, point) -> bool:
    return box.contains(point)


def intersect(a: Box, b: Box) -> Box | None:
    """Intersection box, or None when empty.

    Touching faces give a degenerate (zero-width) interval, which is a
    non-empty box.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"box dimensions differ: {a.dim} vs {b.dim}")
    out = []
    for (alo, ahi), (blo, bhi) in zip(a.intervals, b.intervals):
        lo, hi = max(alo, blo), min(ahi, bhi)
        if lo > hi:
            return None
        out.append((lo, hi))
    return Box(tuple(out))


def is_subbox(inner: Box, outer: Box) -> bool:
    """True iff every interval of `inner` lies inside the matching one of `outer`."""
    if inner.dim != outer.dim:
        raise DimensionMismatch(f"box dimensions differ: {inner.dim} vs {outer.dim}")
    return all(
        olo <= ilo and ihi <= ohi
        for (ilo, ihi), (olo, ohi) in zip(inner.intervals, outer.intervals)
    )
