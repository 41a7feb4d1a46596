"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, EmptyPointSet


def as_points(points, *, allow_empty: bool = False) -> np.ndarray:
    """Coerce a sequence of equal-length numeric vectors to a (n, d) float64 array.

    Raises EmptyPointSet when the sequence is empty (unless allow_empty),
    DimensionMismatch on ragged input, and ValueError on non-finite values.
    """
    try:
        arr = np.asarray(points, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch(f"points are not a rectangular numeric array: {exc}") from None
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d point array, got shape {arr.shape}")
    if arr.shape[0] == 0 and not allow_empty:
        raise EmptyPointSet("point set is empty")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError("points contain non-finite values")
    return arr


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a 1-d float64 vector, optionally checking its length."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a 1-d vector, got shape {arr.shape}")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError("vector contains non-finite values")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {arr.shape[0]}")
    return arr
