"""Cross-method and convergence error measures."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from core.analysis.spline import profile_knots, spline_resample
from core.ensemble.accumulator import EnsembleStats
from core.errors import ConfigurationError
from core.solvers.result import RealizationResult

__all__ = [
    "MOMENTS",
    "QUANTITIES",
    "ErrorReport",
    "MeanRadiusMap",
    "absdev_front_moments",
    "mean_radius_map",
    "pairwise_error",
    "relerr_ff_ft",
]

QUANTITIES = ("u", "H")
MOMENTS = ("mean", "std")


@dataclass(frozen=True, slots=True)
class ErrorReport:
    """One row of an error table."""

    metric: str
    value: float
    pair: tuple[int, int] | None = None
    T: float | None = None
    case: str = ""

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and self.value >= 0):
            raise ConfigurationError(f"{self.metric} must be finite and >= 0, got {self.value}")

    def to_row(self) -> dict[str, object]:
        return {
            "metric": self.metric,
            "pair": "" if self.pair is None else f"{self.pair[0]}-{self.pair[1]}",
            "T": "" if self.T is None else self.T,
            "case": self.case,
            "value": self.value,
        }


# ---------------------------------------------------------------------------
# FF vs FT
# ---------------------------------------------------------------------------


def _check_matched(ff_runs: Sequence[RealizationResult], ft_runs: Sequence[RealizationResult]) -> None:
    if not ff_runs or len(ff_runs) != len(ft_runs):
        raise ConfigurationError(
            f"matched realization sets required, got {len(ff_runs)} and {len(ft_runs)} runs"
        )
    for ff, ft in zip(ff_runs, ft_runs, strict=True):
        if ff.index != ft.index or ff.sample != ft.sample:
            raise ConfigurationError(
                f"realization {ff.index} sample {tuple(ff.sample)} does not match "
                f"realization {ft.index} sample {tuple(ft.sample)}"
            )


def relerr_ff_ft(
    ff_runs: Sequence[RealizationResult],
    ft_runs: Sequence[RealizationResult],
    T: float | None = None,
) -> float:
    """Maximum relative deviation of FT from FF on the FF radii at the final time.

    The FT profile is resampled by natural cubic spline at
    ``r_j = j H_FF(T) / M``.  The front node ``j = M`` is excluded, where both
    methods are 0.
    """
    _check_matched(ff_runs, ft_runs)
    worst = 0.0
    for ff, ft in zip(ff_runs, ft_runs, strict=True):
        if T is not None and not (math.isclose(ff.T, T) and math.isclose(ft.T, T)):
            raise ConfigurationError(f"runs end at T={ff.T}/{ft.T}, expected {T}")
        u_ff = ff.values[:-1]
        u_ft = spline_resample(*profile_knots(ft), ff.radii[:-1])
        diff = np.abs(u_ff - u_ft)
        denom = np.abs(u_ff)
        rel = np.divide(diff, denom, out=np.zeros_like(diff), where=denom > 0)
        rel[(denom == 0) & (diff > 0)] = math.inf
        worst = max(worst, float(rel.max(initial=0.0)))
    return worst


def absdev_front_moments(
    ff_stats: EnsembleStats, ft_stats: EnsembleStats
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Pointwise ``|mu_FF[H] - mu_FT[H]|`` and ``|sigma_FF[H] - sigma_FT[H]|``."""
    if ff_stats.mean_H.size != ft_stats.mean_H.size or not np.allclose(
        ff_stats.times, ft_stats.times, rtol=0.0, atol=1e-12
    ):
        raise ConfigurationError(
            f"time grids differ: {ff_stats.mean_H.size} vs {ft_stats.mean_H.size} levels"
        )
    return (
        np.abs(ff_stats.mean_H - ft_stats.mean_H),
        np.abs(ff_stats.std_H - ft_stats.std_H),
    )


# ---------------------------------------------------------------------------
# Pairwise convergence errors
# ---------------------------------------------------------------------------


def _nested(a: NDArray[np.float64], b: NDArray[np.float64], label: str):
    """Restrict the finer of two nested uniform grids to the coarser one's nodes."""
    if a.size == b.size:
        return a, b
    coarse, fine = (a, b) if a.size < b.size else (b, a)
    ratio, rem = divmod(fine.size - 1, coarse.size - 1) if coarse.size > 1 else (0, 1)
    if rem or ratio < 1:
        raise ConfigurationError(f"{label} grids with {a.size} and {b.size} nodes are not nested")
    fine = fine[::ratio]
    return (coarse, fine) if a.size < b.size else (fine, coarse)


def _padded(a: NDArray[np.float64], size: int) -> NDArray[np.float64]:
    out = np.zeros(size)
    out[: a.size] = a
    return out


def _ft_profiles(a: EnsembleStats, b: EnsembleStats, mom_a, mom_b):
    ratio = a.h / b.h
    if math.isclose(ratio, 1.0):
        fa, fb = mom_a, mom_b
    elif ratio > 1 and math.isclose(ratio, round(ratio)):
        fa, fb = mom_a, mom_b[:: round(ratio)]
    elif ratio < 1 and math.isclose(1 / ratio, round(1 / ratio)):
        fa, fb = mom_a[:: round(1 / ratio)], mom_b
    else:
        raise ConfigurationError(f"FT grids h={a.h} and h={b.h} are not nested")
    size = max(fa.size, fb.size)
    return _padded(fa, size), _padded(fb, size)


def pairwise_error(
    stats_a: EnsembleStats, stats_b: EnsembleStats, quantity: str, moment: str
) -> float:
    """Infinity norm of the pointwise difference of one moment.

    ``quantity`` is ``"u"`` (final field) or ``"H"`` (front trajectory) and
    ``moment`` is ``"mean"`` or ``"std"``.  Nested grids (``M2 = r M1`` or
    ``N2 = r N1``) are compared on the coarser nodes; FT profiles of
    different widths are zero-padded.
    """
    if quantity not in QUANTITIES or moment not in MOMENTS:
        raise ConfigurationError(f"unknown quantity/moment {quantity!r}/{moment!r}")
    if stats_a.method != stats_b.method:
        raise ConfigurationError(f"cannot compare {stats_a.method} with {stats_b.method} stats")

    attr = f"{moment}_{quantity}"
    a = np.asarray(getattr(stats_a, attr))
    b = np.asarray(getattr(stats_b, attr))
    if quantity == "H":
        a, b = _nested(a, b, "time")
    elif stats_a.method == "FF":
        a, b = _nested(a, b, "spatial")
    else:
        a, b = _ft_profiles(stats_a, stats_b, a, b)
    return float(np.max(np.abs(a - b)))


# ---------------------------------------------------------------------------
# Mean-radius mapping
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class MeanRadiusMap:
    """FF moments placed at the mean physical radii ``r_j(t) = (j / M) mu[H(t)]``."""

    times: NDArray[np.float64]
    radii: NDArray[np.float64]
    mean: NDArray[np.float64]
    std: NDArray[np.float64]

    @property
    def final_radii(self) -> NDArray[np.float64]:
        return self.radii[-1]


def mean_radius_map(ff_stats: EnsembleStats, M: int | None = None) -> MeanRadiusMap:
    """Attach FF field moments to the mean radii; both moments are 0 at ``j = M``."""
    if ff_stats.method != "FF":
        raise ConfigurationError(f"mean-radius mapping needs FF stats, got {ff_stats.method}")
    M = ff_stats.M if M is None else M
    if M != ff_stats.M:
        raise ConfigurationError(f"stats hold M={ff_stats.M}, got M={M}")
    fractions = np.arange(M + 1) / M
    radii = np.outer(ff_stats.mean_H, fractions)
    mean = ff_stats.mean_u.copy()
    std = ff_stats.std_u.copy()
    mean[-1] = 0.0
    std[-1] = 0.0
    return MeanRadiusMap(times=ff_stats.times, radii=radii, mean=mean, std=std)
