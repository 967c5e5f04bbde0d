"""Input validation helpers used across the estimators and functions."""

import numbers

import numpy as np

from .exceptions import InputError


def check_points(X, dim=2, name="X"):
    """Return ``X`` as a float array of shape ``(n, dim)``.

    A single point of shape ``(dim,)`` is promoted to ``(1, dim)``.
    Non-finite entries are rejected.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise InputError(f"{name} must have shape (n, {dim}), got {np.shape(X)}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or infinite coordinates")
    return arr


def check_point_array(X, dim=2, name="X"):
    """Like :func:`check_points` but keeps any leading batch shape ``(..., dim)``."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != dim:
        raise InputError(f"{name} must have trailing dimension {dim}, got {np.shape(X)}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or infinite coordinates")
    return arr


def check_triple_array(D, name="distances"):
    arr = np.asarray(D, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 3:
        raise InputError(f"{name} must have trailing dimension 3, got {np.shape(D)}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or infinite values")
    if np.any(arr < 0):
        raise InputError(f"{name} must be nonnegative")
    return arr


def check_tolerance(tol, name="tol"):
    if tol is None:
        return None
    if not isinstance(tol, numbers.Real) or not np.isfinite(tol) or tol < 0:
        raise InputError(f"{name} must be a finite nonnegative number, got {tol!r}")
    return float(tol)


def check_which(which):
    if which not in (1, 2, 3):
        raise InputError(f"which must be 1, 2 or 3, got {which!r}")
    return int(which)
