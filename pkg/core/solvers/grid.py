"""Time discretisation shared by both schemes."""

from __future__ import annotations

import logging
import math
from typing import TypeAlias

import numpy as np
from numpy.typing import NDArray

from core.defaults import AUTO_K_SAFETY
from core.errors import ConfigurationError

logger = logging.getLogger(__name__)

__all__ = ["Real", "auto_step_count", "check_time_grid", "step_size"]

# a scalar or a node-wise array; stencil helpers broadcast over both
Real: TypeAlias = float | NDArray[np.float64]


def check_time_grid(N: int, T: float) -> None:
    if N < 0:
        raise ConfigurationError(f"N must be >= 0, got {N}")
    if not (math.isfinite(T) and T >= 0):
        raise ConfigurationError(f"T must be finite and >= 0, got {T}")
    if (N == 0) != (T == 0):
        raise ConfigurationError(f"N = 0 only goes with T = 0, got N={N}, T={T}")


def step_size(N: int, T: float) -> float:
    """Return ``k = T / N`` (0 for the empty run)."""
    return T / N if N > 0 else 0.0


def auto_step_count(T: float, k_limit: float, safety: float = AUTO_K_SAFETY) -> int:
    """Smallest ``N`` with ``T / N <= safety * k_limit``.

    ``k = T / N`` then divides the horizon exactly.
    """
    if T == 0:
        return 0
    if not (k_limit > 0):
        raise ConfigurationError(f"stability limit must be > 0, got {k_limit}")
    if math.isinf(k_limit):
        return 1
    N = math.ceil(T / (safety * k_limit))
    logger.info("Auto step size: k_max=%.6g -> N=%d, k=%.6g", k_limit, N, T / N)
    return N
