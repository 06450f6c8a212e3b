"""Numerical spreading / vanishing classification of a finished run."""

from __future__ import annotations

import math
from enum import StrEnum

import numpy as np

from core.defaults import OUTCOME_TAIL_FRACTION, OUTCOME_TOL
from core.solvers.result import RealizationResult

__all__ = ["Outcome", "classify_outcome", "default_tail_window"]

_ROUNDOFF = 1e-12


class Outcome(StrEnum):
    SPREADING = "spreading"
    VANISHING = "vanishing"
    UNDETERMINED = "undetermined"


def default_tail_window(levels: int) -> int:
    """Last 10% of the recorded levels, at least two."""
    return max(2, math.ceil(OUTCOME_TAIL_FRACTION * levels))


def classify_outcome(
    result: RealizationResult,
    tail_window: int | None = None,
    tol: float = OUTCOME_TOL,
) -> Outcome:
    """Classify *result* from its peak population and front over the tail window.

    * vanishing: the peak population has decayed below ``tol``;
    * spreading: the peak is non-decreasing over the window and above
      ``tol`` while the mean front speed over the window exceeds ``tol``;
    * undetermined otherwise (including runs with fewer than two levels).
    """
    peak = np.asarray(result.peak)
    if peak[-1] < tol:
        return Outcome.VANISHING
    levels = peak.size
    if levels < 2:
        return Outcome.UNDETERMINED

    window = min(tail_window or default_tail_window(levels), levels)
    window = max(window, 2)
    tail = peak[-window:]
    front = np.asarray(result.H)[-window:]
    times = np.asarray(result.times)[-window:]

    non_decreasing = bool(np.all(np.diff(tail) >= -_ROUNDOFF * np.maximum(1.0, tail[1:])))
    elapsed = times[-1] - times[0]
    speed = (front[-1] - front[0]) / elapsed if elapsed > 0 else 0.0
    if non_decreasing and tail.min() > tol and speed > tol:
        return Outcome.SPREADING
    return Outcome.UNDETERMINED
