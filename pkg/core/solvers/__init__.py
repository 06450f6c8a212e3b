"""Explicit front-fixing and front-tracking schemes."""

from core.solvers.front_fixing import FFGrid, FFState, ff_auto_grid, ff_solve, ff_stability_limit
from core.solvers.front_tracking import FTGrid, FTState, ft_auto_grid, ft_solve, ft_stability_limit
from core.solvers.grid import auto_step_count
from core.solvers.result import METHODS, DroppedNode, RealizationResult

__all__ = [
    "METHODS",
    "DroppedNode",
    "FFGrid",
    "FFState",
    "FTGrid",
    "FTState",
    "RealizationResult",
    "auto_step_count",
    "ff_auto_grid",
    "ff_solve",
    "ff_stability_limit",
    "ft_auto_grid",
    "ft_solve",
    "ft_stability_limit",
]
