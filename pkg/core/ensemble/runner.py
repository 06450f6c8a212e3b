"""Monte Carlo driver over sampled ``(D, eta)`` realizations.

Realization ``l`` draws its parameters from its own stream
``SeedSequence(seed, spawn_key=(l,))``.  Indices are processed in fixed-size
chunks; every chunk sums its realizations in index order and the chunk
partials are merged in chunk order, so the moments are bitwise identical for
any number of workers.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from core.defaults import (
    DEFAULT_K,
    DEFAULT_M,
    DEFAULT_SEED,
    DEFAULT_T,
    ENSEMBLE_CHUNK_SIZE,
    FT_EPS,
    OUTCOME_TOL,
)
from core.dichotomy.outcome import classify_outcome
from core.errors import ConfigurationError, EnsembleError, StabilityError, StefanModelError
from core.ensemble.accumulator import EnsembleStats, MomentAccumulator
from core.model.constants import DerivedConstants, derive_constants
from core.model.sampling import realization_rng, sample_parameters
from core.model.schema import ModelSpec
from core.solvers.front_fixing import FFGrid, ff_solve, ff_stability_limit
from core.solvers.front_tracking import FTGrid, ft_solve, ft_stability_limit
from core.solvers.grid import auto_step_count, step_size
from core.solvers.result import METHODS, RealizationResult

logger = logging.getLogger(__name__)

__all__ = [
    "EnsembleConfig",
    "accumulate",
    "common_step_size",
    "run_ensemble",
    "run_realizations",
    "solve_realization",
]


@dataclass(frozen=True, slots=True)
class EnsembleConfig:
    """One Monte Carlo job.

    ``N = None`` selects the auto step-size rule for the chosen method.
    The stability limits are evaluated at the support bounds ``d2`` and
    ``eta0``, so a single step size is valid for every sample.
    """

    spec: ModelSpec
    method: str = "FF"
    K: int = DEFAULT_K
    seed: int = DEFAULT_SEED
    M: int = DEFAULT_M
    N: int | None = None
    T: float = DEFAULT_T
    eps: float = FT_EPS
    classify_outcomes: bool = False
    tail_window: int | None = None
    tol: float = OUTCOME_TOL
    chunk_size: int = ENSEMBLE_CHUNK_SIZE
    consts: DerivedConstants | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ConfigurationError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.K < 1:
            raise ConfigurationError(f"K must be >= 1, got {self.K}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be >= 0, got {self.seed}")
        if self.chunk_size < 1:
            raise ConfigurationError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if self.consts is None:
            object.__setattr__(self, "consts", derive_constants(self.spec))

    @property
    def constants(self) -> DerivedConstants:
        assert self.consts is not None
        return self.consts

    def stability_limit(self) -> float:
        if self.method == "FF":
            return ff_stability_limit(self.spec, self.constants, 1.0 / self.M)
        return ft_stability_limit(
            self.spec, self.constants, self.spec.H0 / self.M, self.M - 1, self.eps
        )

    def steps(self) -> int:
        """Resolved number of time steps, checked against the worst-case limit."""
        limit = self.stability_limit()
        if self.N is None:
            return auto_step_count(self.T, limit)
        k = step_size(self.N, self.T)
        if self.N > 0 and k > limit:
            raise StabilityError(
                f"{self.method} step k={k:.6g} exceeds the worst-case stability limit {limit:.6g}"
            )
        return self.N

    def grid(self) -> FFGrid | FTGrid:
        if self.method == "FF":
            return FFGrid(M=self.M, N=self.steps(), T=self.T)
        return FTGrid(M=self.M, N=self.steps(), T=self.T, eps=self.eps)


def common_step_size(spec: ModelSpec, M: int, T: float, eps: float = FT_EPS) -> int:
    """Shared ``N`` for an FF/FT comparison: auto rule on the smaller limit."""
    consts = derive_constants(spec)
    k_ff = ff_stability_limit(spec, consts, 1.0 / M)
    k_ft = ft_stability_limit(spec, consts, spec.H0 / M, M - 1, eps)
    logger.info("Stability limits for M=%d: FF %.6g, FT %.6g", M, k_ff, k_ft)
    return auto_step_count(T, min(k_ff, k_ft))


def solve_realization(
    cfg: EnsembleConfig, index: int, grid: FFGrid | FTGrid | None = None
) -> RealizationResult:
    """Sample realization *index* and run the configured solver on it."""
    grid = grid or cfg.grid()
    sample = sample_parameters(cfg.spec, realization_rng(cfg.seed, index))
    try:
        if isinstance(grid, FFGrid):
            return ff_solve(cfg.spec, sample, grid, consts=cfg.consts, index=index)
        return ft_solve(cfg.spec, sample, grid, consts=cfg.consts, index=index)
    except StefanModelError as exc:
        raise EnsembleError(index, exc) from exc


def _chunks(start: int, stop: int, size: int) -> Iterator[tuple[int, int]]:
    for lo in range(start, stop, size):
        yield lo, min(lo + size, stop)


def _run_chunk(cfg: EnsembleConfig, grid: FFGrid | FTGrid, start: int, stop: int) -> MomentAccumulator:
    acc = MomentAccumulator()
    for index in range(start, stop):
        result = solve_realization(cfg, index, grid)
        outcome = None
        if cfg.classify_outcomes:
            outcome = classify_outcome(result, cfg.tail_window, cfg.tol).value
        acc.add(result, outcome)
    logger.debug("Chunk [%d, %d) done", start, stop)
    return acc


def _solve_chunk(cfg: EnsembleConfig, grid: FFGrid | FTGrid, start: int, stop: int) -> list[RealizationResult]:
    return [solve_realization(cfg, index, grid) for index in range(start, stop)]


def accumulate(
    cfg: EnsembleConfig,
    start: int,
    stop: int,
    workers: int = 1,
    grid: FFGrid | FTGrid | None = None,
) -> MomentAccumulator:
    """Sums over realizations ``start <= l < stop``, merged in chunk order."""
    grid = grid or cfg.grid()
    chunks = list(_chunks(start, stop, cfg.chunk_size))
    if workers <= 1:
        partials = [_run_chunk(cfg, grid, lo, hi) for lo, hi in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, cfg, grid, lo, hi) for lo, hi in chunks]
            partials = [future.result() for future in futures]

    total = MomentAccumulator()
    for partial in partials:
        total = total.merge(partial)
    return total


def run_ensemble(cfg: EnsembleConfig, workers: int = 1) -> EnsembleStats:
    """Monte Carlo moments of the population field and front trajectory.

    Raises
    ------
    EnsembleError
        If any realization fails; carries the realization index and cause.
    """
    grid = cfg.grid()
    logger.info(
        "Ensemble %s: K=%d seed=%d M=%d N=%d T=%.6g workers=%d",
        cfg.method,
        cfg.K,
        cfg.seed,
        cfg.M,
        grid.N,
        cfg.T,
        workers,
    )
    started = time.perf_counter()
    stats = accumulate(cfg, 0, cfg.K, workers, grid).finalize()
    logger.info("Ensemble %s finished in %.2fs", cfg.method, time.perf_counter() - started)
    return stats


def run_realizations(cfg: EnsembleConfig, workers: int = 1) -> list[RealizationResult]:
    """All ``K`` realizations of *cfg*, ordered by index."""
    grid = cfg.grid()
    chunks = list(_chunks(0, cfg.K, cfg.chunk_size))
    if workers <= 1:
        batches = [_solve_chunk(cfg, grid, start, stop) for start, stop in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_solve_chunk, cfg, grid, start, stop) for start, stop in chunks]
            batches = [future.result() for future in futures]
    return [result for batch in batches for result in batch]
