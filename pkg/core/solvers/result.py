"""Result of one deterministic solve (one sampled realization)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from core.model.sampling import ParameterSample

__all__ = ["METHODS", "DroppedNode", "RealizationResult"]

METHODS = ("FF", "FT")


@dataclass(frozen=True, slots=True)
class DroppedNode:
    """A node that left the FT interior set on an epsilon-rebase."""

    level: int
    index: int
    value: float


@dataclass(frozen=True, slots=True)
class RealizationResult:
    """Outcome of a single front-fixing or front-tracking run.

    Attributes
    ----------
    method:
        ``"FF"`` or ``"FT"``.
    index:
        Realization index inside an ensemble (0 for stand-alone solves).
    sample:
        The ``(D, eta)`` pair the run was solved with.
    times:
        Time levels ``t^n = n k`` for ``n = 0..N``.
    H:
        Front trajectory ``H(t^n)``.
    peak:
        Maximum population on the active grid at every level.
    radii:
        Physical radii of the final profile (``z_j H(T)`` for FF, ``j h``
        for FT, active nodes only).
    values:
        Final population at ``radii``.  For FF this is the transformed field
        ``v(z_j, T)`` and ends with the front value 0.
    h, k:
        Spatial and temporal step sizes actually used.
    node_count:
        ``M + 1`` for FF.  For FT ``i* + 2``, where ``i*`` is the grid index
        with ``r_{i*} < H <= r_{i*+1}``.
    z:
        Transformed coordinates ``z_j = j / M`` (FF only).
    front_retreats:
        Levels on which the front moved backwards (clamped to zero travel
        for FT).
    fractions:
        Front offset ``p = H / h - i`` at every level (FT only).
    """

    method: str
    index: int
    sample: ParameterSample
    times: NDArray[np.float64]
    H: NDArray[np.float64]
    peak: NDArray[np.float64]
    radii: NDArray[np.float64]
    values: NDArray[np.float64]
    h: float
    k: float
    node_count: int
    z: NDArray[np.float64] | None = None
    front_retreats: int = 0
    rebases: int = 0
    added_nodes: int = 0
    dropped: tuple[DroppedNode, ...] = field(default_factory=tuple)
    fractions: NDArray[np.float64] | None = None

    @property
    def front(self) -> float:
        """Front position at the final level."""
        return float(self.H[-1])

    @property
    def levels(self) -> int:
        return len(self.times) - 1

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def diagnostics(self) -> dict[str, int]:
        return {
            "front_retreats": self.front_retreats,
            "rebases": self.rebases,
            "added_nodes": self.added_nodes,
            "dropped_nodes": len(self.dropped),
        }
