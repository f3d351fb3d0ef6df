"""Input validation helpers shared by the estimators and data model."""

from __future__ import annotations

import numpy as np

from .exceptions import DataError, WindowOutOfRangeError


def as_float_array(values, name="values", allow_nan=False):
    """Coerce to a 1-D float64 array, rejecting non-finite entries unless allowed."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DataError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not allow_nan and not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    if allow_nan and np.any(np.isinf(arr)):
        raise DataError(f"{name} contains infinite values")
    return arr


def as_2d_array(X, name="X"):
    """Coerce to a 2-D float64 array with finite entries."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DataError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr


def check_matching_length(a, b, name_a="first", name_b="second"):
    if len(a) != len(b):
        raise DataError(
            f"length mismatch: {name_a} has {len(a)} entries, {name_b} has {len(b)}"
        )


def check_years(times, name="times"):
    """Validate a strictly increasing integer year vector."""
    arr = np.asarray(times)
    if arr.ndim != 1 or arr.size == 0:
        raise DataError(f"{name} must be a non-empty one-dimensional sequence")
    if not np.issubdtype(arr.dtype, np.integer):
        as_int = arr.astype(int)
        if not np.array_equal(as_int, arr):
            raise DataError(f"{name} must be integer calendar years")
        arr = as_int
    if np.any(np.diff(arr) <= 0):
        raise DataError(f"{name} must be strictly increasing with no duplicates")
    return arr.astype(np.int64)


def check_window(start, end, times, what="window"):
    """Ensure [start, end] is a non-empty year window inside ``times``."""
    if start > end:
        raise WindowOutOfRangeError(f"{what} start {start} is after end {end}")
    if start < times[0] or end > times[-1]:
        raise WindowOutOfRangeError(
            f"{what} {start}-{end} outside available span {times[0]}-{times[-1]}"
        )
    mask = (times >= start) & (times <= end)
    if not np.any(mask):
        raise WindowOutOfRangeError(f"{what} {start}-{end} selects no observations")
    return mask


def check_probability(value, name="level"):
    if not (0.0 < value < 1.0):
        raise DataError(f"{name} must lie strictly between 0 and 1, got {value}")
    return float(value)


def check_positive_int(value, floor, name):
    if int(value) != value or value < floor:
        raise DataError(f"{name} must be an integer >= {floor}, got {value}")
    return int(value)
