"""Derived constants feeding the stability bounds of both schemes.

``alpha1 <= alpha(r) <= alpha2`` and ``beta1 <= beta(r) <= beta2`` bound the
growth functions, ``C0``/``Cm`` are the supremum/infimum of the carrying
capacity ``alpha/beta``, ``M0`` is the peak of ``u0`` and ``P0 = max(M0, C0)``.

Constant and rational-affine growth functions are bounded analytically over
``[0, inf)``: the extrema of a quotient of polynomials are attained at
``r = 0``, at interior critical points (roots of ``N'D - ND'``) or in the
limit ``r -> inf``.  Tabulated inputs are scanned over ``[0, r_max]``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
from numpy.polynomial import Polynomial

from core.defaults import DENSE_SCAN_POINTS, WORKING_DOMAIN_FACTOR
from core.errors import InvariantViolationError, ModelViolationError
from core.model.schema import GrowthFunction, ModelSpec

logger = logging.getLogger(__name__)

__all__ = ["DerivedConstants", "default_working_domain", "derive_constants", "growth_bounds"]

_ROOT_IMAG_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class DerivedConstants:
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float
    C0: float
    Cm: float
    M0: float
    P0: float
    r_max: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def default_working_domain(spec: ModelSpec) -> float:
    """Return the scan window ``r_max`` (config override, else ``H0 + 10 H0``)."""
    if spec.r_max is not None:
        return spec.r_max
    return WORKING_DOMAIN_FACTOR * spec.H0


def _positive_real_roots(poly: Polynomial) -> list[float]:
    poly = poly.trim()
    if poly.degree() < 1:
        return []
    roots = poly.roots()
    return [float(z.real) for z in roots if abs(z.imag) < _ROOT_IMAG_TOL and z.real >= 0]


def _rational_bounds(num: Polynomial, den: Polynomial, label: str) -> tuple[float, float]:
    """Return ``(inf, sup)`` of ``num/den`` over ``[0, inf)``."""
    num, den = num.trim(), den.trim()
    if _positive_real_roots(den) or den(0.0) == 0:
        raise ModelViolationError(f"{label} has a pole on [0, inf)")

    if num.degree() > den.degree():
        raise ModelViolationError(f"{label} is unbounded as r -> inf")
    if num.degree() < den.degree() or (num.degree() == 0 and num.coef[0] == 0):
        limit = 0.0
    else:
        limit = float(num.coef[-1] / den.coef[-1])

    critical = num.deriv() * den - num * den.deriv()
    candidates = [0.0, *_positive_real_roots(critical)]
    values = [float(num(r) / den(r)) for r in candidates]
    values.append(limit)
    return min(values), max(values)


def _scan_window(spec: ModelSpec, r_max: float) -> np.ndarray:
    hi = r_max
    extra: list[np.ndarray] = []
    for g in (spec.alpha, spec.beta):
        if g.kind == "tabulated":
            lo_g, hi_g = g.knot_range
            if lo_g > 0:
                raise ModelViolationError(f"tabulated growth must start at r = 0, starts at {lo_g}")
            if hi_g < hi:
                logger.warning(
                    "Tabulated growth ends at r=%.6g < r_max=%.6g; scanning the tabulated range only",
                    hi_g,
                    hi,
                )
                hi = hi_g
            extra.append(g.knots)
    grid = np.linspace(0.0, hi, DENSE_SCAN_POINTS)
    if extra:
        knots = np.concatenate(extra)
        grid = np.union1d(grid, knots[knots <= hi])
    return grid


def _scan_bounds(values: np.ndarray, label: str) -> tuple[float, float]:
    if not np.all(np.isfinite(values)):
        raise ModelViolationError(f"{label} is not finite on the working domain")
    return float(np.min(values)), float(np.max(values))


def growth_bounds(g: GrowthFunction, r_max: float) -> tuple[float, float]:
    """Return ``(inf, sup)`` of one growth function.

    Analytic over ``[0, inf)`` for the closed forms, scanned over
    ``[0, min(r_max, last knot)]`` for tabulated input.
    """
    if g.kind != "tabulated":
        num, den = g.as_rational()
        return _rational_bounds(num, den, g.kind)
    hi = min(r_max, g.knot_range[1])
    grid = np.union1d(np.linspace(0.0, hi, DENSE_SCAN_POINTS), g.knots[g.knots <= hi])
    return _scan_bounds(np.asarray(g(grid)), g.kind)


def derive_constants(spec: ModelSpec, r_max: float | None = None) -> DerivedConstants:
    """Compute the bounds used by both schemes' stability limits.

    Parameters
    ----------
    spec:
        Problem instance.
    r_max:
        Working domain for tabulated inputs.  Defaults to
        :func:`default_working_domain`.

    Raises
    ------
    ModelViolationError
        When ``alpha`` or ``beta`` is non-positive, unbounded or has a pole on
        the working domain.
    """
    window = r_max if r_max is not None else default_working_domain(spec)
    if window <= 0:
        raise ModelViolationError(f"r_max must be > 0, got {window}")

    analytic = spec.alpha.kind != "tabulated" and spec.beta.kind != "tabulated"
    if analytic:
        a_num, a_den = spec.alpha.as_rational()
        b_num, b_den = spec.beta.as_rational()
        alpha1, alpha2 = _rational_bounds(a_num, a_den, "alpha")
        beta1, beta2 = _rational_bounds(b_num, b_den, "beta")
        if alpha1 > 0 and beta1 > 0:
            Cm, C0 = _rational_bounds(a_num * b_den, a_den * b_num, "alpha/beta")
        else:
            Cm = C0 = math.nan
    else:
        grid = _scan_window(spec, window)
        alpha_vals = np.asarray(spec.alpha(grid))
        beta_vals = np.asarray(spec.beta(grid))
        alpha1, alpha2 = _scan_bounds(alpha_vals, "alpha")
        beta1, beta2 = _scan_bounds(beta_vals, "beta")
        if alpha1 > 0 and beta1 > 0:
            Cm, C0 = _scan_bounds(alpha_vals / beta_vals, "alpha/beta")
        else:
            Cm = C0 = math.nan

    for label, lower in (("alpha", alpha1), ("beta", beta1)):
        if not lower > 0:
            raise ModelViolationError(f"{label} must be positive on [0, {window}], infimum is {lower}")

    M0 = spec.ic.peak()
    consts = DerivedConstants(
        alpha1=alpha1,
        alpha2=alpha2,
        beta1=beta1,
        beta2=beta2,
        C0=C0,
        Cm=Cm,
        M0=M0,
        P0=max(M0, C0),
        r_max=window,
    )
    _check_ordering(consts)
    logger.debug("Derived constants: %s", consts)
    return consts


def _check_ordering(consts: DerivedConstants) -> None:
    ok = (
        consts.alpha1 <= consts.alpha2
        and consts.beta1 <= consts.beta2
        and consts.Cm <= consts.C0
        and consts.P0 >= consts.M0
        and consts.P0 >= consts.C0
    )
    if not ok:
        raise InvariantViolationError(f"derived constants out of order: {consts}")
