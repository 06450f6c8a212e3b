"""Problem-instance schema for the random free-boundary logistic model.

A :class:`ModelSpec` bundles the two random parameters (diffusion ``D`` and
front-speed coefficient ``eta``), the growth functions ``alpha(r)`` and
``beta(r)``, and the initial population bump.  All types are frozen after
construction so that they can be shipped to worker processes and shared
between concurrent solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Final, overload

import numpy as np
from numpy.polynomial import Polynomial
from numpy.typing import NDArray

from core.errors import ConfigurationError, ModelViolationError

__all__ = [
    "DISTRIBUTION_KINDS",
    "GROWTH_KINDS",
    "INITIAL_CONDITION_KINDS",
    "GrowthFunction",
    "InitialCondition",
    "ModelSpec",
    "ScalarDistribution",
    "evaluate_growth",
]

DISTRIBUTION_KINDS: Final = frozenset({"truncated-normal", "truncated-beta", "point"})
GROWTH_KINDS: Final = frozenset({"constant", "rational-affine", "tabulated"})
INITIAL_CONDITION_KINDS: Final = frozenset({"cosine-bump", "parabolic-bump", "tabulated"})

FloatOrArray = float | NDArray[np.float64]


# ---------------------------------------------------------------------------
# Random parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ScalarDistribution:
    """A bounded random parameter.

    Attributes
    ----------
    kind:
        ``truncated-normal``, ``truncated-beta`` or ``point``.
    loc:
        Mean of the untruncated normal, or the value of a point mass.
    scale:
        Standard deviation of the untruncated normal.
    shape_a, shape_b:
        Beta shape parameters; the standard Beta(a, b) law on [0, 1] is mapped
        affinely onto ``[support_lo, support_hi]``.
    support_lo, support_hi:
        Truncation interval.  Equal to ``loc`` for a point mass.
    """

    kind: str
    loc: float = 0.0
    scale: float = 0.0
    shape_a: float = 1.0
    shape_b: float = 1.0
    support_lo: float = 0.0
    support_hi: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in DISTRIBUTION_KINDS:
            raise ConfigurationError(
                f"unknown distribution kind {self.kind!r}; expected one of {sorted(DISTRIBUTION_KINDS)}"
            )
        values = (self.loc, self.scale, self.shape_a, self.shape_b, self.support_lo, self.support_hi)
        if not all(math.isfinite(v) for v in values):
            raise ConfigurationError(f"distribution parameters must be finite: {values}")
        if self.kind == "point":
            if not (self.support_lo == self.support_hi == self.loc):
                raise ConfigurationError("point distribution requires support_lo == support_hi == loc")
            return
        if self.support_lo >= self.support_hi:
            raise ConfigurationError(
                f"support must satisfy lo < hi, got [{self.support_lo}, {self.support_hi}]"
            )
        if self.kind == "truncated-normal" and self.scale < 0:
            raise ConfigurationError(f"scale must be >= 0, got {self.scale}")
        if self.kind == "truncated-beta" and (self.shape_a <= 0 or self.shape_b <= 0):
            raise ConfigurationError(
                f"beta shapes must be > 0, got a={self.shape_a}, b={self.shape_b}"
            )

    @classmethod
    def point(cls, value: float) -> ScalarDistribution:
        return cls(kind="point", loc=value, support_lo=value, support_hi=value)

    @classmethod
    def truncated_normal(cls, loc: float, scale: float, lo: float, hi: float) -> ScalarDistribution:
        return cls(kind="truncated-normal", loc=loc, scale=scale, support_lo=lo, support_hi=hi)

    @classmethod
    def truncated_beta(cls, a: float, b: float, lo: float, hi: float) -> ScalarDistribution:
        return cls(kind="truncated-beta", shape_a=a, shape_b=b, support_lo=lo, support_hi=hi)

    @property
    def is_degenerate(self) -> bool:
        return self.kind == "point"

    def to_dict(self) -> dict[str, float | str]:
        """Serialise to a plain dict."""
        return {
            "kind": self.kind,
            "loc": self.loc,
            "scale": self.scale,
            "shape_a": self.shape_a,
            "shape_b": self.shape_b,
            "support_lo": self.support_lo,
            "support_hi": self.support_hi,
        }


# ---------------------------------------------------------------------------
# Growth functions alpha(r), beta(r)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class GrowthFunction:
    """A bounded positive function of the radius.

    ``constant`` uses ``value``; ``rational-affine`` evaluates
    ``(p*r + q) / (s*r + t)`` from ``coeffs = (p, q, s, t)``; ``tabulated``
    interpolates linearly between sorted ``(r, value)`` knots and refuses to
    extrapolate.
    """

    kind: str
    value: float = 0.0
    coeffs: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 1.0)
    table: tuple[tuple[float, float], ...] = ()
    _knots_r: NDArray[np.float64] = field(init=False, repr=False, compare=False)
    _knots_v: NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in GROWTH_KINDS:
            raise ConfigurationError(
                f"unknown growth kind {self.kind!r}; expected one of {sorted(GROWTH_KINDS)}"
            )
        knots_r = np.empty(0)
        knots_v = np.empty(0)
        if self.kind == "constant":
            if not (math.isfinite(self.value) and self.value > 0):
                raise ModelViolationError(f"constant growth must be positive, got {self.value}")
        elif self.kind == "rational-affine":
            if len(self.coeffs) != 4 or not all(math.isfinite(c) for c in self.coeffs):
                raise ConfigurationError(f"rational-affine needs four finite coeffs, got {self.coeffs}")
            _, _, s, t = self.coeffs
            if s == 0 and t == 0:
                raise ModelViolationError("rational-affine denominator is identically zero")
        else:
            if len(self.table) < 2:
                raise ConfigurationError("tabulated growth needs at least two knots")
            knots_r = np.array([r for r, _ in self.table], dtype=float)
            knots_v = np.array([v for _, v in self.table], dtype=float)
            if np.any(np.diff(knots_r) <= 0):
                raise ConfigurationError("tabulated knots must be strictly increasing in r")
            if knots_r[0] < 0:
                raise ConfigurationError("tabulated knots must start at r >= 0")
        object.__setattr__(self, "_knots_r", knots_r)
        object.__setattr__(self, "_knots_v", knots_v)

    @classmethod
    def constant(cls, value: float) -> GrowthFunction:
        return cls(kind="constant", value=value)

    @classmethod
    def rational_affine(cls, p: float, q: float, s: float, t: float) -> GrowthFunction:
        return cls(kind="rational-affine", coeffs=(p, q, s, t))

    @classmethod
    def tabulated(cls, pairs: list[tuple[float, float]] | tuple[tuple[float, float], ...]) -> GrowthFunction:
        return cls(kind="tabulated", table=tuple((float(r), float(v)) for r, v in pairs))

    @property
    def is_constant(self) -> bool:
        if self.kind == "constant":
            return True
        if self.kind == "rational-affine":
            p, q, s, t = self.coeffs
            return p * t == q * s
        return False

    @property
    def knot_range(self) -> tuple[float, float]:
        if self.kind != "tabulated":
            return (0.0, math.inf)
        return (float(self._knots_r[0]), float(self._knots_r[-1]))

    @property
    def knots(self) -> NDArray[np.float64]:
        return self._knots_r

    def as_rational(self) -> tuple[Polynomial, Polynomial]:
        """Return ``(numerator, denominator)`` polynomials in r.

        Only defined for the constant and rational-affine kinds.
        """
        if self.kind == "constant":
            return Polynomial([self.value]), Polynomial([1.0])
        if self.kind == "rational-affine":
            p, q, s, t = self.coeffs
            return Polynomial([q, p]), Polynomial([t, s])
        raise ModelViolationError("tabulated growth has no rational form")

    @overload
    def __call__(self, r: float) -> float: ...

    @overload
    def __call__(self, r: NDArray[np.float64]) -> NDArray[np.float64]: ...

    def __call__(self, r: FloatOrArray) -> FloatOrArray:
        return evaluate_growth(self, r)

    def to_dict(self) -> dict[str, object]:
        """Serialise to a plain dict."""
        if self.kind == "constant":
            return {"kind": self.kind, "value": self.value}
        if self.kind == "rational-affine":
            return {"kind": self.kind, "coeffs": list(self.coeffs)}
        return {"kind": self.kind, "table": [list(pair) for pair in self.table]}


def evaluate_growth(g: GrowthFunction, r: FloatOrArray) -> FloatOrArray:
    """Evaluate *g* at radius *r* (scalar or array, r >= 0)."""
    scalar = np.ndim(r) == 0
    radii = np.asarray(r, dtype=float)
    if np.any(radii < 0):
        raise ConfigurationError(f"growth functions are defined for r >= 0, got {np.min(radii)}")

    if g.kind == "constant":
        out = np.full_like(radii, g.value)
    elif g.kind == "rational-affine":
        p, q, s, t = g.coeffs
        out = (p * radii + q) / (s * radii + t)
    else:
        lo, hi = g.knot_range
        if np.any(radii < lo) or np.any(radii > hi):
            raise ModelViolationError(
                f"tabulated growth queried outside knots [{lo}, {hi}]: "
                f"r in [{np.min(radii)}, {np.max(radii)}]"
            )
        out = np.interp(radii, g._knots_r, g._knots_v)

    if scalar:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Initial condition
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class InitialCondition:
    """Initial population density ``u0`` on ``[0, H0]``.

    ``cosine-bump`` is ``cos(pi r / (2 H0))``; ``parabolic-bump`` is
    ``1 - (r / H0)^2``; ``tabulated`` interpolates linearly between
    ``(r, value)`` knots running from ``r = 0`` to ``r = H0``.
    """

    kind: str
    H0: float
    table: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in INITIAL_CONDITION_KINDS:
            raise ConfigurationError(
                f"unknown initial condition {self.kind!r}; expected one of {sorted(INITIAL_CONDITION_KINDS)}"
            )
        if not (math.isfinite(self.H0) and self.H0 > 0):
            raise ConfigurationError(f"H0 must be > 0, got {self.H0}")
        if self.kind != "tabulated":
            return
        if len(self.table) < 3:
            raise ConfigurationError("tabulated u0 needs at least three knots")
        radii = [r for r, _ in self.table]
        values = [v for _, v in self.table]
        if any(b <= a for a, b in zip(radii, radii[1:], strict=False)):
            raise ConfigurationError("tabulated u0 knots must be strictly increasing in r")
        if radii[0] != 0.0 or not math.isclose(radii[-1], self.H0):
            raise ConfigurationError("tabulated u0 must span exactly [0, H0]")
        if values[-1] != 0.0:
            raise ModelViolationError("u0(H0) must be 0")
        if any(v <= 0 for v in values[:-1]):
            raise ModelViolationError("u0 must be positive on [0, H0)")

    def __call__(self, r: FloatOrArray) -> FloatOrArray:
        radii = np.asarray(r, dtype=float)
        if self.kind == "cosine-bump":
            out = np.cos(np.pi * radii / (2.0 * self.H0))
        elif self.kind == "parabolic-bump":
            out = 1.0 - (radii / self.H0) ** 2
        else:
            knots = np.array(self.table, dtype=float)
            out = np.interp(radii, knots[:, 0], knots[:, 1], right=0.0)
        out = np.where(radii >= self.H0, 0.0, out)
        if np.ndim(r) == 0:
            return float(out)
        return out

    def front_slope(self) -> float:
        """Return ``u0'(H0)`` (analytic for the bumps, last-segment slope otherwise)."""
        if self.kind == "cosine-bump":
            return -math.pi / (2.0 * self.H0)
        if self.kind == "parabolic-bump":
            return -2.0 / self.H0
        (r_a, v_a), (r_b, v_b) = self.table[-2], self.table[-1]
        return (v_b - v_a) / (r_b - r_a)

    def peak(self) -> float:
        """Return ``M0 = max u0`` on ``[0, H0]``."""
        if self.kind in {"cosine-bump", "parabolic-bump"}:
            return 1.0
        return max(v for _, v in self.table)

    def to_dict(self) -> dict[str, object]:
        """Serialise to a plain dict."""
        data: dict[str, object] = {"kind": self.kind, "H0": self.H0}
        if self.table:
            data["table"] = [list(pair) for pair in self.table]
        return data


# ---------------------------------------------------------------------------
# Full problem instance
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ModelSpec:
    """The random free-boundary problem instance.

    ``d1``, ``d2`` and ``eta0`` are derived from the supports of
    ``D_dist`` and ``eta_dist`` and are not passed in.
    """

    D_dist: ScalarDistribution
    eta_dist: ScalarDistribution
    alpha: GrowthFunction
    beta: GrowthFunction
    ic: InitialCondition
    r_max: float | None = None
    d1: float = field(init=False)
    d2: float = field(init=False)
    eta0: float = field(init=False)

    def __post_init__(self) -> None:
        d1, d2 = self.D_dist.support_lo, self.D_dist.support_hi
        if not (0 < d1 <= d2):
            raise ConfigurationError(f"D support must satisfy 0 < d1 <= d2, got [{d1}, {d2}]")
        eta0 = self.eta_dist.support_lo
        if eta0 <= 0:
            raise ConfigurationError(f"eta support must be bounded below by eta0 > 0, got {eta0}")
        if self.r_max is not None and not self.r_max > 0:
            raise ConfigurationError(f"r_max must be > 0, got {self.r_max}")
        object.__setattr__(self, "d1", d1)
        object.__setattr__(self, "d2", d2)
        object.__setattr__(self, "eta0", eta0)

    @property
    def H0(self) -> float:
        return self.ic.H0

    @property
    def is_deterministic(self) -> bool:
        return self.D_dist.is_degenerate and self.eta_dist.is_degenerate

    def to_dict(self) -> dict[str, object]:
        """Serialise to a plain dict."""
        return {
            "D": self.D_dist.to_dict(),
            "eta": self.eta_dist.to_dict(),
            "alpha": self.alpha.to_dict(),
            "beta": self.beta.to_dict(),
            "u0": self.ic.to_dict(),
            "r_max": self.r_max,
        }
