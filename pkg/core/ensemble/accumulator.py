"""Running first and second moments over realizations.

Accumulators keep, per node and per time level, the running mean and the
sum of squared deviations ``M2`` of the population profile and of the front
trajectory.  Samples are folded in one at a time and partials are combined
with the pairwise update, so identical samples give a spread of exactly 0.
FT profiles have different active lengths; a shorter profile contributes
zeros past its own end, so the moments always live on the widest grid seen
so far.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from core.errors import ConfigurationError, IncompatibleEnsembleError
from core.solvers.result import RealizationResult

__all__ = [
    "EnsembleStats",
    "MomentAccumulator",
    "PaddedTable",
    "merge_stats",
    "pad_to_common_grid",
]


def _padded(values: NDArray[np.float64], size: int) -> NDArray[np.float64]:
    if values.size >= size:
        return values
    grown = np.zeros(size)
    grown[: values.size] = values
    return grown


@dataclass(frozen=True, slots=True)
class EnsembleStats:
    """Pointwise mean and standard deviation over ``K_effective`` realizations.

    ``grid`` holds ``z_j`` for FF (transformed field) and ``r_j = j h`` for
    FT (padded physical profile).  ``I_max`` is only set for FT.
    """

    method: str
    K_effective: int
    grid: NDArray[np.float64]
    mean_u: NDArray[np.float64]
    std_u: NDArray[np.float64]
    times: NDArray[np.float64]
    mean_H: NDArray[np.float64]
    std_H: NDArray[np.float64]
    h: float
    k: float
    I_max: int | None = None
    outcomes: dict[str, int] = field(default_factory=dict)

    @property
    def M(self) -> int:
        return self.grid.size - 1


@dataclass(slots=True)
class MomentAccumulator:
    """Running mean and ``M2`` for one method on one grid."""

    method: str | None = None
    h: float | None = None
    k: float | None = None
    count: int = 0
    mean_u: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    m2_u: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    mean_H: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    m2_H: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    times: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    I_max: int = 0
    outcomes: dict[str, int] = field(default_factory=dict)

    def _check(self, method: str, h: float, k: float, levels: int) -> None:
        if self.count == 0:
            return
        if method != self.method:
            raise IncompatibleEnsembleError(f"cannot mix {self.method} and {method} results")
        if h != self.h or k != self.k:
            raise IncompatibleEnsembleError(
                f"step sizes differ: (h={self.h}, k={self.k}) vs (h={h}, k={k})"
            )
        if levels != self.mean_H.size:
            raise IncompatibleEnsembleError(
                f"time grids differ: {self.mean_H.size} vs {levels} levels"
            )

    def add(self, result: RealizationResult, outcome: str | None = None) -> None:
        """Fold one realization into the running moments."""
        self._check(result.method, result.h, result.k, result.H.size)
        if self.count == 0:
            self.method, self.h, self.k = result.method, result.h, result.k
            self.mean_H = np.zeros(result.H.size)
            self.m2_H = np.zeros(result.H.size)
            self.times = np.asarray(result.times, dtype=float)
        values = np.asarray(result.values, dtype=float)
        size = max(self.mean_u.size, values.size)
        self.mean_u = _padded(self.mean_u, size)
        self.m2_u = _padded(self.m2_u, size)
        self.count += 1
        self.mean_u, self.m2_u = _welford(self.mean_u, self.m2_u, _padded(values, size), self.count)
        self.mean_H, self.m2_H = _welford(
            self.mean_H, self.m2_H, np.asarray(result.H, dtype=float), self.count
        )
        self.I_max = max(self.I_max, values.size)
        if outcome is not None:
            self.outcomes[outcome] = self.outcomes.get(outcome, 0) + 1

    def merge(self, other: MomentAccumulator) -> MomentAccumulator:
        """Combine two accumulators over disjoint realizations."""
        if other.count == 0:
            return self.copy()
        if self.count == 0:
            return other.copy()
        self._check(other.method or "", other.h or 0.0, other.k or 0.0, other.mean_H.size)
        outcomes = dict(self.outcomes)
        for key, value in other.outcomes.items():
            outcomes[key] = outcomes.get(key, 0) + value
        size = max(self.mean_u.size, other.mean_u.size)
        mean_u, m2_u = _combine(
            self.count,
            _padded(self.mean_u, size),
            _padded(self.m2_u, size),
            other.count,
            _padded(other.mean_u, size),
            _padded(other.m2_u, size),
        )
        mean_H, m2_H = _combine(
            self.count, self.mean_H, self.m2_H, other.count, other.mean_H, other.m2_H
        )
        return MomentAccumulator(
            method=self.method,
            h=self.h,
            k=self.k,
            count=self.count + other.count,
            mean_u=mean_u,
            m2_u=m2_u,
            mean_H=mean_H,
            m2_H=m2_H,
            times=self.times,
            I_max=max(self.I_max, other.I_max),
            outcomes=outcomes,
        )

    def copy(self) -> MomentAccumulator:
        return MomentAccumulator(
            method=self.method,
            h=self.h,
            k=self.k,
            count=self.count,
            mean_u=self.mean_u.copy(),
            m2_u=self.m2_u.copy(),
            mean_H=self.mean_H.copy(),
            m2_H=self.m2_H.copy(),
            times=self.times.copy(),
            I_max=self.I_max,
            outcomes=dict(self.outcomes),
        )

    def finalize(self) -> EnsembleStats:
        """``mu`` and the population standard deviation ``sqrt(M2 / K)``."""
        if self.count == 0 or self.method is None or self.h is None or self.k is None:
            raise ConfigurationError("cannot finalize an empty accumulator")
        K = self.count
        size = self.mean_u.size
        if self.method == "FF":
            grid = np.arange(size, dtype=float) / (size - 1)
        else:
            grid = np.arange(size, dtype=float) * self.h
        return EnsembleStats(
            method=self.method,
            K_effective=K,
            grid=grid,
            mean_u=self.mean_u.copy(),
            std_u=np.sqrt(np.maximum(0.0, self.m2_u / K)),
            times=self.times,
            mean_H=self.mean_H.copy(),
            std_H=np.sqrt(np.maximum(0.0, self.m2_H / K)),
            h=self.h,
            k=self.k,
            I_max=self.I_max if self.method == "FT" else None,
            outcomes=dict(self.outcomes),
        )


def _welford(
    mean: NDArray[np.float64], m2: NDArray[np.float64], x: NDArray[np.float64], n: int
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    delta = x - mean
    mean = mean + delta / n
    return mean, m2 + delta * (x - mean)


def _combine(
    n_a: int,
    mean_a: NDArray[np.float64],
    m2_a: NDArray[np.float64],
    n_b: int,
    mean_b: NDArray[np.float64],
    m2_b: NDArray[np.float64],
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    n = n_a + n_b
    delta = mean_b - mean_a
    mean = mean_a + delta * (n_b / n)
    return mean, m2_a + m2_b + delta * delta * (n_a * n_b / n)


def merge_stats(partial_a: MomentAccumulator, partial_b: MomentAccumulator) -> MomentAccumulator:
    return partial_a.merge(partial_b)


@dataclass(frozen=True, slots=True)
class PaddedTable:
    """FT profiles stacked row-wise, zero-padded to ``I_max`` columns."""

    radii: NDArray[np.float64]
    values: NDArray[np.float64]
    lengths: tuple[int, ...]

    @property
    def I_max(self) -> int:
        return self.values.shape[1]


def pad_to_common_grid(
    results: Sequence[RealizationResult], I_max: int | None = None
) -> PaddedTable:
    """Stack FT profiles on the common grid ``r_j = j h``, padding with zeros."""
    if not results:
        raise ConfigurationError("no results to pad")
    h = results[0].h
    for res in results:
        if res.method != "FT":
            raise IncompatibleEnsembleError(f"padding applies to FT results, got {res.method}")
        if res.h != h:
            raise IncompatibleEnsembleError(f"mixed step sizes: h={h} and h={res.h}")
    lengths = tuple(res.values.size for res in results)
    width = max(lengths)
    if I_max is not None:
        if I_max < width:
            raise ConfigurationError(f"I_max={I_max} is below the widest profile ({width})")
        width = I_max
    table = np.zeros((len(results), width))
    for row, res in enumerate(results):
        table[row, : res.values.size] = res.values
    return PaddedTable(radii=np.arange(width) * h, values=table, lengths=lengths)
