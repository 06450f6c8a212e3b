"""Front-fixing (FF) explicit scheme.

The Landau change of variables ``z = r / H(t)`` maps the moving domain onto
``[0, 1]``.  The unknowns become the transformed population ``v(z, t)`` and
the squared front ``g = H^2``.  Each step first advances ``g`` from the
one-sided gradient at the front, then updates the interior with the
three-point stencil

    v_j^{n+1} = A v_{j-1} + B v_j + C v_{j+1},   1 <= j <= M-1,

and closes with ``v_0 = (4 v_1 - v_2) / 3`` and ``v_M = 0``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from core.defaults import FF_MIN_INTERVALS
from core.errors import (
    ConfigurationError,
    FrontCollapseError,
    InvariantViolationError,
    StabilityError,
)
from core.model.constants import DerivedConstants, derive_constants
from core.model.sampling import ParameterSample
from core.model.schema import ModelSpec
from core.solvers.grid import Real, auto_step_count, check_time_grid, step_size
from core.solvers.result import RealizationResult

logger = logging.getLogger(__name__)

__all__ = [
    "FFGrid",
    "FFState",
    "ff_auto_grid",
    "ff_coefficients",
    "ff_front_update",
    "ff_solve",
    "ff_stability_limit",
    "ff_step",
]


@dataclass(frozen=True, slots=True)
class FFGrid:
    """Uniform grid on ``[0, 1] x [0, T]`` with ``M`` intervals and ``N`` steps."""

    M: int
    N: int
    T: float
    z: NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.M < FF_MIN_INTERVALS:
            raise ConfigurationError(f"M must be >= {FF_MIN_INTERVALS}, got {self.M}")
        check_time_grid(self.N, self.T)
        # j / M keeps z_M == 1 exactly
        object.__setattr__(self, "z", np.arange(self.M + 1, dtype=float) / self.M)

    @property
    def h(self) -> float:
        return 1.0 / self.M

    @property
    def k(self) -> float:
        return step_size(self.N, self.T)


@dataclass(frozen=True, slots=True)
class FFState:
    """Transformed field ``v`` on the ``M + 1`` nodes, squared front ``g`` and level ``n``."""

    v: NDArray[np.float64]
    g: float
    n: int = 0

    def __post_init__(self) -> None:
        if self.v.ndim != 1 or self.v.size < 3:
            raise InvariantViolationError(f"v needs at least 3 nodes, got shape {self.v.shape}")
        if self.v[-1] != 0.0:
            raise InvariantViolationError(f"v_M must be 0 at level {self.n}, got {self.v[-1]}")
        if not (math.isfinite(self.g) and self.g > 0):
            raise InvariantViolationError(f"g must be finite and > 0, got {self.g}")

    @property
    def H(self) -> float:
        return math.sqrt(self.g)


def _bounded_ratio(num: float, den: float) -> float:
    return num / den if den > 0 else math.inf


def ff_stability_limit(spec: ModelSpec, consts: DerivedConstants, h: float) -> float:
    """Largest step ``k`` keeping the FF scheme positive, monotone and bounded.

    Returns ``Q h^2`` with ``Q = min(Q1, Q2, Q3)`` evaluated at the worst-case
    diffusion ``d2``.
    """
    if not h > 0:
        raise ConfigurationError(f"h must be > 0, got {h}")
    H0sq = spec.H0**2
    d2 = spec.d2
    h2 = h * h
    c = consts
    q1 = _bounded_ratio(
        H0sq, 2 * d2 + h2 * c.alpha1 * H0sq * (c.alpha2 * c.beta2 / (c.alpha1 * c.beta1) - 1)
    )
    q2 = _bounded_ratio(H0sq, 2 * d2 + h2 * c.beta2 * H0sq * (2 * c.M0 - c.Cm))
    q3 = _bounded_ratio(4 * H0sq, 9 * d2 + 8 * h2 * c.beta2 * H0sq * c.P0)
    return min(q1, q2, q3) * h2


def ff_front_update(state: FFState, eta: float, k: float, h: float) -> float:
    """Return ``g^{n+1} = g^n + (k/h) eta (4 v_{M-1} - v_{M-2})``."""
    v = state.v
    g_next = state.g + (k / h) * eta * (4.0 * v[-2] - v[-3])
    if not g_next > 0:
        raise FrontCollapseError(
            f"front collapsed at level {state.n + 1}: g={g_next!r} (eta={eta}, k={k}, h={h})"
        )
    return float(g_next)


def ff_coefficients(
    D: float,
    k: float,
    h: float,
    g_n: float,
    g_next: float,
    z_j: Real,
    a_j: Real,
    b_j: Real,
    v_j: Real,
) -> tuple[Real, Real, Real]:
    """Stencil weights ``(A, B, C)`` at node ``z_j``; arrays broadcast.

    ``A + C = 2 D k / (h^2 g_n)`` and ``A + B + C = 1 + k (a_j - b_j v_j)``.
    """
    diff = D * k / (h * h * g_n)
    drift = D * k / (2.0 * h * g_n * z_j)
    stretch = (z_j / (4.0 * h)) * (g_next / g_n - 1.0)
    A = diff - drift - stretch
    C = diff + drift + stretch
    B = 1.0 + k * (a_j - b_j * v_j) - 2.0 * diff
    return A, B, C


def ff_step(state: FFState, sample: ParameterSample, spec: ModelSpec, grid: FFGrid) -> FFState:
    """Advance one level: front first, then interior, then boundary closure.

    Growth functions are evaluated at the physical radii ``z_j sqrt(g^n)``
    of the current level.
    """
    D, eta = sample
    h, k = grid.h, grid.k
    g_next = ff_front_update(state, eta, k, h)

    v = state.v
    z = grid.z[1:-1]
    r = z * math.sqrt(state.g)
    a = spec.alpha(r)
    b = spec.beta(r)
    A, B, C = ff_coefficients(D, k, h, state.g, g_next, z, a, b, v[1:-1])

    v_next = np.empty_like(v)
    v_next[1:-1] = A * v[:-2] + B * v[1:-1] + C * v[2:]
    v_next[0] = (4.0 * v_next[1] - v_next[2]) / 3.0
    v_next[-1] = 0.0

    level = state.n + 1
    if not (np.all(np.isfinite(v_next)) and math.isfinite(g_next)):
        raise InvariantViolationError(f"non-finite value in FF step at level {level}")
    if np.any(v_next < 0):
        j = int(np.argmin(v_next))
        raise InvariantViolationError(
            f"negative population v[{j}]={v_next[j]!r} at level {level}; "
            f"step size k={k} breaks positivity"
        )
    return FFState(v=v_next, g=g_next, n=level)


def ff_auto_grid(spec: ModelSpec, M: int, T: float, consts: DerivedConstants | None = None) -> FFGrid:
    """Grid with ``N`` chosen by the auto step-size rule for the FF limit."""
    consts = consts or derive_constants(spec)
    k_limit = ff_stability_limit(spec, consts, 1.0 / M)
    return FFGrid(M=M, N=auto_step_count(T, k_limit), T=T)


def ff_solve(
    spec: ModelSpec,
    sample: ParameterSample,
    grid: FFGrid,
    *,
    consts: DerivedConstants | None = None,
    index: int = 0,
) -> RealizationResult:
    """Run the FF scheme up to ``grid.T`` for one ``(D, eta)`` sample.

    Raises
    ------
    StabilityError
        If ``grid.k`` exceeds :func:`ff_stability_limit`.
    FrontCollapseError, InvariantViolationError
        On a collapsing front, a negative population or a non-finite value.
    """
    consts = consts or derive_constants(spec)
    k_limit = ff_stability_limit(spec, consts, grid.h)
    if grid.N > 0 and grid.k > k_limit:
        raise StabilityError(f"FF step k={grid.k:.6g} exceeds the stability limit {k_limit:.6g} (M={grid.M})")

    state = FFState(v=np.asarray(spec.ic(grid.z * spec.H0), dtype=float), g=spec.H0**2)
    H = np.empty(grid.N + 1)
    peak = np.empty(grid.N + 1)
    H[0] = state.H
    peak[0] = state.v.max()
    retreats = 0

    logger.debug("FF solve #%d: D=%.6g eta=%.6g M=%d N=%d", index, sample.D, sample.eta, grid.M, grid.N)
    for n in range(1, grid.N + 1):
        g_prev = state.g
        state = ff_step(state, sample, spec, grid)
        if state.g < g_prev:
            retreats += 1
        H[n] = state.H
        peak[n] = state.v.max()

    if retreats:
        logger.warning("FF solve #%d: front retreated on %d levels", index, retreats)
    return RealizationResult(
        method="FF",
        index=index,
        sample=sample,
        times=np.arange(grid.N + 1) * grid.k,
        H=H,
        peak=peak,
        radii=grid.z * state.H,
        values=state.v,
        h=grid.h,
        k=grid.k,
        node_count=grid.M + 1,
        z=grid.z,
        front_retreats=retreats,
    )
