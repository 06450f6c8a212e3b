"""Spreading-vanishing threshold ``R*``.

``R*`` is the first positive root of the solution of

    phi'' + phi' / r + (alpha(r) / D) phi = 0,   phi(0) = C,  phi'(0) = 0.

For constant ``alpha`` this is ``j0 sqrt(D / alpha)`` with ``j0`` the first
zero of the Bessel function ``J0``.  Otherwise the IVP is integrated with a
fixed-step RK4 and the first sign change is refined by bisection.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect
from scipy.special import jn_zeros

from core.defaults import IVP_CAP_FACTOR, IVP_ROOT_XTOL, IVP_STEP_FACTOR
from core.errors import ConfigurationError, ModelViolationError, NoRootFoundError
from core.model.constants import growth_bounds
from core.model.schema import GrowthFunction, ModelSpec

logger = logging.getLogger(__name__)

__all__ = [
    "J0_FIRST_ZERO",
    "SpreadingGuarantee",
    "ThresholdResult",
    "rstar",
    "rstar_analytic",
    "rstar_numeric",
    "spreading_guarantee",
]

J0_FIRST_ZERO: float = float(jn_zeros(0, 1)[0])


@dataclass(frozen=True, slots=True)
class ThresholdResult:
    r_star: float
    method: str
    D_used: float
    residual: float = 0.0

    def to_dict(self) -> dict[str, float | str]:
        return {
            "r_star": self.r_star,
            "method": self.method,
            "D_used": self.D_used,
            "residual": self.residual,
        }


class SpreadingGuarantee(NamedTuple):
    guaranteed: bool
    r_star_max: float
    method: str


def rstar_analytic(D: float, alpha_const: float) -> float:
    """``R* = j0 sqrt(D / alpha)`` for a constant growth rate."""
    if not (D > 0 and alpha_const > 0):
        raise ConfigurationError(f"D and alpha must be > 0, got D={D}, alpha={alpha_const}")
    return J0_FIRST_ZERO * math.sqrt(D / alpha_const)


def _rhs(r: float, phi: float, dphi: float, a: float, D: float) -> tuple[float, float]:
    if r == 0.0:
        # series limit of phi'/r at the origin
        return dphi, -a * phi / (2.0 * D)
    return dphi, -dphi / r - a * phi / D


def _rk4(
    r: float, phi: float, dphi: float, dr: float, a0: float, a_half: float, a1: float, D: float
) -> tuple[float, float]:
    k1p, k1d = _rhs(r, phi, dphi, a0, D)
    half = 0.5 * dr
    k2p, k2d = _rhs(r + half, phi + half * k1p, dphi + half * k1d, a_half, D)
    k3p, k3d = _rhs(r + half, phi + half * k2p, dphi + half * k2d, a_half, D)
    k4p, k4d = _rhs(r + dr, phi + dr * k3p, dphi + dr * k3d, a1, D)
    phi_next = phi + dr / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    dphi_next = dphi + dr / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
    return phi_next, dphi_next


def rstar_numeric(
    D: float,
    alpha: GrowthFunction,
    C: float = 1.0,
    r_cap: float | None = None,
) -> ThresholdResult:
    """First positive root of the IVP solution for a general ``alpha``.

    ``r_cap`` defaults to a margin above ``rstar_analytic(D, inf alpha)``,
    which bounds the root from above.

    Raises
    ------
    NoRootFoundError
        If ``phi`` keeps its sign up to ``r_cap``.
    """
    if not (D > 0 and C > 0):
        raise ConfigurationError(f"D and C must be > 0, got D={D}, C={C}")
    kappa1, _ = growth_bounds(alpha, r_cap if r_cap is not None else math.inf)
    if not kappa1 > 0:
        raise ModelViolationError(f"alpha must be positive, infimum is {kappa1}")
    if r_cap is None:
        r_cap = IVP_CAP_FACTOR * rstar_analytic(D, kappa1)
    if alpha.kind == "tabulated":
        r_cap = min(r_cap, alpha.knot_range[1])
    if not r_cap > 0:
        raise ConfigurationError(f"r_cap must be > 0, got {r_cap}")

    dr = IVP_STEP_FACTOR * math.sqrt(D / kappa1)
    n_steps = math.ceil(r_cap / dr)
    # alpha on the full and half steps, evaluated once
    radii = np.arange(2 * n_steps + 1) * (0.5 * dr)
    if alpha.kind == "tabulated":
        radii = np.minimum(radii, r_cap)
    a = np.asarray(alpha(radii), dtype=float).tolist()

    phi, dphi = C, 0.0
    for n in range(n_steps):
        r = n * dr
        phi_next, dphi_next = _rk4(r, phi, dphi, dr, a[2 * n], a[2 * n + 1], a[2 * n + 2], D)
        if phi_next <= 0.0:
            break
        phi, dphi = phi_next, dphi_next
    else:
        raise NoRootFoundError(f"no sign change of phi on [0, {r_cap:.6g}] for D={D}; raise r_cap")

    r_lo, a_lo = n * dr, a[2 * n]
    if phi_next == 0.0:
        return ThresholdResult(r_star=r_lo + dr, method="ivp-root", D_used=D)

    def shoot(x: float) -> float:
        s = x - r_lo
        a_mid = float(alpha(min(r_lo + 0.5 * s, r_cap)))
        return _rk4(r_lo, phi, dphi, s, a_lo, a_mid, float(alpha(min(x, r_cap))), D)[0]

    root = float(bisect(shoot, r_lo, r_lo + dr, xtol=IVP_ROOT_XTOL))
    residual = abs(shoot(root))
    logger.debug("IVP root for D=%.6g: r*=%.10g (residual %.3g)", D, root, residual)
    return ThresholdResult(r_star=root, method="ivp-root", D_used=D, residual=residual)


def rstar(D: float, alpha: GrowthFunction) -> ThresholdResult:
    """``R*`` for one diffusion value: analytic when ``alpha`` is constant."""
    if alpha.is_constant:
        return ThresholdResult(
            r_star=rstar_analytic(D, float(alpha(0.0))), method="analytic", D_used=D
        )
    return rstar_numeric(D, alpha)


def spreading_guarantee(spec: ModelSpec) -> SpreadingGuarantee:
    """Whether ``H0 >= R*(d2)``, i.e. spreading for every realization."""
    result = rstar(spec.d2, spec.alpha)
    guaranteed = spec.H0 >= result.r_star
    logger.info(
        "R*_max=%.6g (%s, D=%.6g), H0=%.6g -> guaranteed=%s",
        result.r_star,
        result.method,
        spec.d2,
        spec.H0,
        guaranteed,
    )
    return SpreadingGuarantee(guaranteed=guaranteed, r_star_max=result.r_star, method=result.method)
