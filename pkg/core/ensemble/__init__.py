"""Monte Carlo ensembles and their moment accumulators."""

from core.ensemble.accumulator import (
    EnsembleStats,
    MomentAccumulator,
    PaddedTable,
    merge_stats,
    pad_to_common_grid,
)
from core.ensemble.runner import (
    EnsembleConfig,
    common_step_size,
    run_ensemble,
    run_realizations,
    solve_realization,
)

__all__ = [
    "EnsembleConfig",
    "EnsembleStats",
    "MomentAccumulator",
    "PaddedTable",
    "common_step_size",
    "merge_stats",
    "pad_to_common_grid",
    "run_ensemble",
    "run_realizations",
    "solve_realization",
]
