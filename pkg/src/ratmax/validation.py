"""Input validation helpers used by the domain types and the estimator API."""

from __future__ import annotations

import numpy as np

from .errors import DataError


def as_float_vector(x, name: str = "x") -> np.ndarray:
    """Coerce to a 1-D float64 array, rejecting NaN/Inf entries."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DataError(f"{name} must be one-dimensional, got shape {arr.shape}")
    require_finite(arr, name)
    return arr


def as_float_matrix(x, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D float64 array (a single vector becomes one row)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DataError(f"{name} must be two-dimensional, got shape {arr.shape}")
    require_finite(arr, name)
    return arr


def require_finite(arr: np.ndarray, name: str) -> None:
    if arr.size and not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite entries (NaN or Inf)")


def check_same_length(n_left: int, n_right: int, what: str) -> None:
    if n_left != n_right:
        raise DataError(f"{what}: lengths differ ({n_left} vs {n_right})")


def readonly(arr: np.ndarray) -> np.ndarray:
    """Return a copy flagged non-writeable, for use inside frozen value objects."""
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out
