"""Natural cubic-spline resampling of FT profiles."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import CubicSpline

from core.errors import ConfigurationError
from core.solvers.result import RealizationResult

__all__ = ["MIN_SPLINE_KNOTS", "profile_knots", "spline_resample"]

MIN_SPLINE_KNOTS = 4


def profile_knots(result: RealizationResult) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Node radii and values ending in the front point ``(H, 0)``.

    FT profiles stop at the last interior node, so the front is appended;
    FF profiles already end on it.
    """
    radii = np.asarray(result.radii, dtype=float)
    values = np.asarray(result.values, dtype=float)
    if radii[-1] < result.front:
        radii = np.append(radii, result.front)
        values = np.append(values, 0.0)
    return radii, values


def spline_resample(
    radii: ArrayLike, values: ArrayLike, query_radii: ArrayLike
) -> NDArray[np.float64]:
    """Evaluate the natural cubic spline through ``(radii, values)`` at *query_radii*.

    The last knot is taken as the front: queries beyond it return 0.

    Raises
    ------
    ConfigurationError
        With fewer than four knots, non-increasing radii or negative queries.
    """
    r = np.asarray(radii, dtype=float)
    v = np.asarray(values, dtype=float)
    q = np.atleast_1d(np.asarray(query_radii, dtype=float))
    if r.size < MIN_SPLINE_KNOTS or r.size != v.size:
        raise ConfigurationError(
            f"spline needs >= {MIN_SPLINE_KNOTS} knots with matching values, got {r.size}/{v.size}"
        )
    if np.any(np.diff(r) <= 0):
        raise ConfigurationError("spline knots must be strictly increasing")
    if np.any(q < r[0]):
        raise ConfigurationError(f"query radius below the first knot {r[0]}")

    spline = CubicSpline(r, v, bc_type="natural")
    inside = q <= r[-1]
    out = np.zeros_like(q)
    out[inside] = spline(q[inside])
    return out
