"""Front-tracking (FT) explicit scheme on a fixed physical grid.

Nodes sit at ``r_j = j h`` with ``h = H0 / M``.  The front lies a fraction
``p`` of a cell beyond the last interior node ``i``, so ``H = (i + p) h``.
Derivatives at node ``i`` and at the front come from the quadratic through
``(r_{i-1}, u_{i-1})``, ``(r_i, u_i)`` and ``(H, 0)``.

Per level the front advance ``Delta`` is computed from the old values, then
the interior and the last interior node are updated, ``u_0`` is closed from
the new values, and the advance is classified:

* ``eps < Delta <= 1 + eps``: the front stays in the same cell, ``p = Delta``;
* ``1 + eps < Delta <= 2 + eps``: node ``i + 1`` becomes interior, its value
  interpolated from the new level, and ``p = Delta - 1``.

Whenever ``p`` falls to ``eps`` or below, node ``i`` is dropped from the
interior set (``i -= 1``, ``p += 1``).  A negative advance is clamped to
zero travel and counted as a front retreat, so within ft_solve ``p`` stays
above ``eps`` and the drop only fires through :func:`ft_move_front` called
with a smaller advance.

The reported node count follows the grid index ``i*`` with
``r_{i*} < H <= r_{i*+1}``: it is ``i* + 2``, where ``i* = i + 1`` while
``p > 1`` and ``i* = i`` otherwise.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from core.defaults import FF_MIN_INTERVALS, FT_EPS, FT_INITIAL_CAPACITY_FACTOR
from core.errors import (
    ConfigurationError,
    DomainExhaustedError,
    InvariantViolationError,
    StabilityError,
)
from core.model.constants import DerivedConstants, derive_constants
from core.model.sampling import ParameterSample
from core.model.schema import ModelSpec
from core.solvers.grid import Real, auto_step_count, check_time_grid, step_size
from core.solvers.result import DroppedNode, RealizationResult

logger = logging.getLogger(__name__)

__all__ = [
    "FTGrid",
    "FTState",
    "FrontMove",
    "ft_add_node",
    "ft_auto_grid",
    "ft_coefficients",
    "ft_front_advance",
    "ft_interior_step",
    "ft_last_interior_step",
    "ft_move_front",
    "ft_rebase",
    "ft_solve",
    "ft_stability_limit",
]


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise ConfigurationError(f"eps must lie in (0,1), got {eps}")


@dataclass(frozen=True, slots=True)
class FTGrid:
    """``M`` cells over ``[0, H0]``, ``N`` steps up to ``T`` and the rebase threshold."""

    M: int
    N: int
    T: float
    eps: float = FT_EPS

    def __post_init__(self) -> None:
        if self.M < FF_MIN_INTERVALS:
            raise ConfigurationError(f"M must be >= {FF_MIN_INTERVALS}, got {self.M}")
        check_time_grid(self.N, self.T)
        _check_eps(self.eps)

    @property
    def k(self) -> float:
        return step_size(self.N, self.T)

    @property
    def i0(self) -> int:
        return self.M - 1

    def spacing(self, H0: float) -> float:
        return H0 / self.M


@dataclass(slots=True)
class FTState:
    """Mutable FT state.

    ``u`` is a growable buffer; only ``u[:i + 1]`` is active and entries
    past ``i`` are kept at zero.
    """

    u: NDArray[np.float64]
    i: int
    p: float
    h: float
    k: float
    eps: float = FT_EPS
    n: int = 0
    growth_a: NDArray[np.float64] = field(default_factory=lambda: np.empty(0), repr=False)
    growth_b: NDArray[np.float64] = field(default_factory=lambda: np.empty(0), repr=False)

    def __post_init__(self) -> None:
        _check_eps(self.eps)
        if self.i < 2:
            raise DomainExhaustedError(f"FT state needs i >= 2, got {self.i}")
        if self.u.size < self.i + 2:
            raise InvariantViolationError(f"buffer of {self.u.size} cannot hold i={self.i}")

    @property
    def H(self) -> float:
        return (self.i + self.p) * self.h

    @property
    def active(self) -> NDArray[np.float64]:
        return self.u[: self.i + 1]

    @property
    def node_count(self) -> int:
        """``i* + 2`` with ``r_{i*} < H <= r_{i*+1}``."""
        return self.i + 2 + (1 if self.p > 1.0 else 0)

    def ensure_capacity(self, size: int) -> None:
        if size <= self.u.size:
            return
        new_size = max(size, 2 * self.u.size)
        for name in ("u", "growth_a", "growth_b"):
            old = getattr(self, name)
            grown = np.zeros(new_size)
            grown[: old.size] = old
            setattr(self, name, grown)


# ---------------------------------------------------------------------------
# Stability
# ---------------------------------------------------------------------------


def ft_stability_limit(
    spec: ModelSpec, consts: DerivedConstants, h: float, i0: int, eps: float
) -> float:
    """Minimum of the front-speed, interior-positivity and last-node bounds."""
    _check_eps(eps)
    if not h > 0:
        raise ConfigurationError(f"h must be > 0, got {h}")
    slope = abs(spec.ic.front_slope())
    speed = h / (spec.eta0 * slope) if slope > 0 else math.inf
    interior = h * h / (2 * spec.d2 + abs(consts.alpha1 - consts.beta2 * consts.P0) * h * h)
    last = eps * h * h * i0 / (spec.d2 * (2 * i0 + 1 - eps))
    return min(speed, interior, last)


# ---------------------------------------------------------------------------
# Local updates
# ---------------------------------------------------------------------------


def ft_coefficients(
    D: float, k: float, h: float, j: Real, alpha_j: Real, beta_j: Real, u_j: Real
) -> tuple[Real, Real, Real]:
    """Interior stencil weights ``(A, B, C)``; ``A + C = 2 k D / h^2``."""
    lam = k * D / (h * h)
    half = 1.0 / (2.0 * np.asarray(j, dtype=float))
    A = lam * (1.0 - half)
    C = lam * (1.0 + half)
    B = 1.0 + k * (-2.0 * D / (h * h) + alpha_j - beta_j * u_j)
    return A, B, C


def ft_interior_step(
    state: FTState, D: float, alpha_j: Real, beta_j: Real, j: int | NDArray[np.int_]
) -> Real:
    """New value at interior node(s) ``j`` (``1 <= j <= i - 1``), scalar or array."""
    idx = np.asarray(j)
    if np.any(idx < 1) or np.any(idx > state.i - 1):
        raise InvariantViolationError(f"interior index out of [1, {state.i - 1}]: {j}")
    u = state.u
    A, B, C = ft_coefficients(D, state.k, state.h, idx, alpha_j, beta_j, u[idx])
    out = A * u[idx - 1] + B * u[idx] + C * u[idx + 1]
    if np.ndim(out) == 0:
        return float(out)
    return out


def ft_last_interior_step(state: FTState, D: float, alpha_i: float, beta_i: float) -> float:
    """New value at the last interior node ``i`` from the one-sided quadratic stencil."""
    i, p = state.i, state.p
    if p <= state.eps:
        raise InvariantViolationError(f"p={p} <= eps={state.eps}; rebase must run first")
    if i < 2:
        raise DomainExhaustedError(f"last interior node needs i >= 2, got {i}")
    u_prev, u_i = state.u[i - 1], state.u[i]
    h, k = state.h, state.k
    diffusion = (D / (h * h)) * (
        u_prev / (p + 1.0) * (2.0 - p / i) - u_i / p * (2.0 + (1.0 - p) / i)
    )
    return float(u_i + k * (diffusion + u_i * (alpha_i - beta_i * u_i)))


def ft_front_advance(state: FTState, eta: float) -> tuple[float, float]:
    """Return ``(Delta, H_next)`` from the Stefan condition at the current level.

    Raises
    ------
    StabilityError
        If ``Delta > 2 + eps`` (the front crossed more than one cell).
    """
    i, p, h = state.i, state.p, state.h
    if p <= state.eps:
        raise InvariantViolationError(f"p={p} <= eps={state.eps}; rebase must run first")
    u_prev, u_i = state.u[i - 1], state.u[i]
    delta = p + (state.k * eta / (h * h)) * ((p + 1.0) / p * u_i - p / (p + 1.0) * u_prev)
    if not math.isfinite(delta):
        raise InvariantViolationError(f"non-finite front advance at level {state.n + 1}")
    if delta > 2.0 + state.eps:
        raise StabilityError(
            f"front advanced Delta={delta:.6g} > 2+eps at level {state.n + 1}; k={state.k} is too large"
        )
    return float(delta), float((i + delta) * h)


def ft_add_node(delta: float, u_prev: float, u_i: float) -> float:
    """Value of the node activated when the front crosses a grid point.

    Quadratic interpolation through ``(r_{i-1}, u_prev)``, ``(r_i, u_i)`` and
    the new front, falling back to linear interpolation between ``r_i`` and
    the front when the quadratic is not positive.
    """
    quadratic = (1.0 - delta) / (1.0 + delta) * u_prev + 2.0 * (delta - 1.0) / delta * u_i
    if quadratic > 0:
        return float(quadratic)
    return float(max(0.0, (1.0 - 1.0 / delta) * u_i))


def ft_rebase(state: FTState) -> FTState:
    """Drop node ``i`` from the interior set: ``i -= 1`` and ``p += 1``; ``H`` is unchanged."""
    if state.p > state.eps:
        raise InvariantViolationError(f"rebase needs p <= eps, got p={state.p}")
    if state.i - 1 < 2:
        raise DomainExhaustedError(
            f"rebase would leave i={state.i - 1} < 2; the front is too close to the origin"
        )
    state.i -= 1
    state.p += 1.0
    return state


class FrontMove(NamedTuple):
    """What happened to the interior set when the front moved one level."""

    added: bool
    dropped: DroppedNode | None


def ft_move_front(state: FTState, delta: float, spec: ModelSpec) -> FrontMove:
    """Place the front at ``(i + delta) h`` after the values of the level are updated.

    Past ``1 + eps`` node ``i + 1`` is activated with :func:`ft_add_node`;
    at ``eps`` or below node ``i`` is dropped with :func:`ft_rebase` and its
    last value is returned so the caller can record it.
    """
    i = state.i
    added = delta > 1.0 + state.eps
    if added:
        state.ensure_capacity(i + 3)
        state.u[i + 1] = ft_add_node(delta, state.u[i - 1], state.u[i])
        r_new = (i + 1) * state.h
        state.growth_a[i + 1] = spec.alpha(r_new)
        state.growth_b[i + 1] = spec.beta(r_new)
        state.i = i + 1
        state.p = delta - 1.0
        logger.debug("FT level %d: node %d activated (Delta=%.6g)", state.n, i + 1, delta)
    else:
        state.p = delta

    if state.p > state.eps:
        return FrontMove(added=added, dropped=None)
    dropped = DroppedNode(level=state.n, index=state.i, value=float(state.u[state.i]))
    ft_rebase(state)
    state.u[state.i + 1] = 0.0
    logger.debug("FT level %d: rebase to i=%d", state.n, state.i)
    return FrontMove(added=added, dropped=dropped)


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------


def ft_auto_grid(
    spec: ModelSpec, M: int, T: float, eps: float = FT_EPS, consts: DerivedConstants | None = None
) -> FTGrid:
    """Grid with ``N`` chosen by the auto step-size rule for the FT limit."""
    consts = consts or derive_constants(spec)
    k_limit = ft_stability_limit(spec, consts, spec.H0 / M, M - 1, eps)
    return FTGrid(M=M, N=auto_step_count(T, k_limit), T=T, eps=eps)


def _initial_state(spec: ModelSpec, grid: FTGrid) -> FTState:
    h = grid.spacing(spec.H0)
    i0 = grid.i0
    capacity = FT_INITIAL_CAPACITY_FACTOR * (grid.M + 1)
    u = np.zeros(capacity)
    radii = np.arange(i0 + 1) * h
    u[: i0 + 1] = spec.ic(radii)
    if not np.any(u[: i0 + 1] > 0):
        raise ConfigurationError("initial population is identically zero")
    state = FTState(u=u, i=i0, p=1.0, h=h, k=grid.k, eps=grid.eps)
    state.growth_a = np.zeros(capacity)
    state.growth_b = np.zeros(capacity)
    state.growth_a[: i0 + 1] = spec.alpha(radii)
    state.growth_b[: i0 + 1] = spec.beta(radii)
    return state


def ft_solve(
    spec: ModelSpec,
    sample: ParameterSample,
    grid: FTGrid,
    *,
    consts: DerivedConstants | None = None,
    index: int = 0,
) -> RealizationResult:
    """Run the FT scheme up to ``grid.T`` for one ``(D, eta)`` sample.

    Raises
    ------
    StabilityError
        If ``grid.k`` exceeds :func:`ft_stability_limit` or the front jumps
        more than one cell in a step.
    DomainExhaustedError, InvariantViolationError
        On a rebase below two interior nodes, a negative population or a
        non-finite value.
    """
    consts = consts or derive_constants(spec)
    state = _initial_state(spec, grid)
    k_limit = ft_stability_limit(spec, consts, state.h, grid.i0, grid.eps)
    if grid.N > 0 and grid.k > k_limit:
        raise StabilityError(f"FT step k={grid.k:.6g} exceeds the stability limit {k_limit:.6g} (M={grid.M})")

    D, eta = sample
    H = np.empty(grid.N + 1)
    peak = np.empty(grid.N + 1)
    fractions = np.empty(grid.N + 1)
    H[0] = state.H
    peak[0] = state.active.max()
    fractions[0] = state.p
    retreats = rebases = added = 0
    dropped: list[DroppedNode] = []

    logger.debug("FT solve #%d: D=%.6g eta=%.6g M=%d N=%d", index, D, eta, grid.M, grid.N)
    for n in range(1, grid.N + 1):
        i = state.i
        delta, _ = ft_front_advance(state, eta)
        if delta < state.p:
            retreats += 1
            delta = state.p

        j = np.arange(1, i)
        u_next = state.u.copy()
        u_next[1:i] = ft_interior_step(state, D, state.growth_a[1:i], state.growth_b[1:i], j)
        u_next[i] = ft_last_interior_step(state, D, state.growth_a[i], state.growth_b[i])
        u_next[0] = (4.0 * u_next[1] - u_next[2]) / 3.0
        state.u = u_next
        state.n = n

        move = ft_move_front(state, delta, spec)
        added += move.added
        if move.dropped is not None:
            dropped.append(move.dropped)
            rebases += 1

        active = state.active
        if not np.all(np.isfinite(active)):
            raise InvariantViolationError(f"non-finite value in FT step at level {n}")
        if np.any(active < 0):
            j_bad = int(np.argmin(active))
            raise InvariantViolationError(
                f"negative population u[{j_bad}]={active[j_bad]!r} at level {n}; "
                f"step size k={state.k} breaks positivity"
            )
        H[n] = state.H
        peak[n] = active.max()
        fractions[n] = state.p

    if retreats:
        logger.warning("FT solve #%d: clamped %d front retreats", index, retreats)
    return RealizationResult(
        method="FT",
        index=index,
        sample=sample,
        times=np.arange(grid.N + 1) * grid.k,
        H=H,
        peak=peak,
        radii=np.arange(state.i + 1) * state.h,
        values=state.active.copy(),
        h=state.h,
        k=state.k,
        node_count=state.node_count,
        front_retreats=retreats,
        fractions=fractions,
        rebases=rebases,
        added_nodes=added,
        dropped=tuple(dropped),
    )
