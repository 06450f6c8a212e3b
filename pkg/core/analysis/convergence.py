"""Pairwise convergence studies over K, M and N ladders.

Consecutive ladder entries are compared with :func:`pairwise_error` for the
mean and standard deviation of the final field and of the front trajectory.
The K ladder reuses realizations: entry ``K_i`` extends the sums of
``K_{i-1}`` with indices ``K_{i-1} <= l < K_i``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import replace

from core.analysis.metrics import MOMENTS, QUANTITIES, ErrorReport, pairwise_error
from core.defaults import DEFAULT_SEED, K_LADDER, M_LADDER, N_LADDER
from core.ensemble.accumulator import EnsembleStats, MomentAccumulator
from core.ensemble.runner import EnsembleConfig, accumulate, run_ensemble
from core.errors import ConfigurationError
from core.model.schema import ModelSpec
from core.solvers.grid import auto_step_count

logger = logging.getLogger(__name__)

__all__ = ["k_ladder", "ladder_reports", "m_ladder", "n_ladder"]


def _check_ladder(values: Sequence[int], label: str) -> None:
    if len(values) < 2:
        raise ConfigurationError(f"{label} ladder needs at least two entries, got {list(values)}")
    if any(b <= a for a, b in zip(values, values[1:], strict=False)):
        raise ConfigurationError(f"{label} ladder must be strictly increasing, got {list(values)}")


def ladder_reports(
    label: str, values: Sequence[int], stats: Sequence[EnsembleStats], T: float, case: str = ""
) -> list[ErrorReport]:
    """One report per consecutive pair, quantity and moment."""
    reports: list[ErrorReport] = []
    for (v1, s1), (v2, s2) in zip(
        zip(values, stats, strict=True), zip(values[1:], stats[1:], strict=True), strict=False
    ):
        for quantity in QUANTITIES:
            for moment in MOMENTS:
                reports.append(
                    ErrorReport(
                        metric=f"{label}:{moment}[{quantity}]",
                        value=pairwise_error(s1, s2, quantity, moment),
                        pair=(v1, v2),
                        T=T,
                        case=case,
                    )
                )
    return reports


def k_ladder(
    spec: ModelSpec,
    Ks: Sequence[int] = K_LADDER,
    *,
    M: int = 50,
    N: int | None = 2000,
    T: float = 1.0,
    seed: int = DEFAULT_SEED,
    method: str = "FF",
    workers: int = 1,
    case: str = "",
) -> list[ErrorReport]:
    """Monte Carlo convergence: pairwise errors between consecutive ``K``.

    ``N = None`` applies the auto step-size rule.
    """
    _check_ladder(Ks, "K")
    cfg = EnsembleConfig(spec=spec, method=method, K=max(Ks), seed=seed, M=M, N=N, T=T)
    grid = cfg.grid()
    acc = MomentAccumulator()
    done = 0
    stats: list[EnsembleStats] = []
    for K in Ks:
        acc = acc.merge(accumulate(cfg, done, K, workers, grid))
        done = K
        stats.append(acc.finalize())
        logger.info("K ladder: K=%d done", K)
    return ladder_reports("K", Ks, stats, T, case)


def m_ladder(
    spec: ModelSpec,
    Ms: Sequence[int] = M_LADDER,
    *,
    K: int = 100,
    N: int | None = None,
    T: float = 1.0,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    case: str = "",
) -> list[ErrorReport]:
    """Spatial refinement at a fixed ``N`` (auto-sized for the finest ``M``)."""
    _check_ladder(Ms, "M")
    base = EnsembleConfig(spec=spec, method="FF", K=K, seed=seed, M=max(Ms), N=N, T=T)
    if N is None:
        N = auto_step_count(T, base.stability_limit())
    stats = [run_ensemble(replace(base, M=M, N=N), workers) for M in Ms]
    return ladder_reports("M", Ms, stats, T, case)


def n_ladder(
    spec: ModelSpec,
    Ns: Sequence[int] = N_LADDER,
    *,
    K: int = 100,
    M: int = 50,
    T: float = 1.0,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    case: str = "",
) -> list[ErrorReport]:
    """Temporal refinement at a fixed ``M``."""
    _check_ladder(Ns, "N")
    base = EnsembleConfig(spec=spec, method="FF", K=K, seed=seed, M=M, N=min(Ns), T=T)
    stats = [run_ensemble(replace(base, N=N), workers) for N in Ns]
    return ladder_reports("N", Ns, stats, T, case)
