"""Flat ``key=value`` problem configuration files.

Files are read with :func:`dotenv.dotenv_values` (no interpolation) and
validated against a strict schema: unknown keys, missing required keys and
malformed values are :class:`ConfigurationError` naming the offending key.

Example::

    model.D.kind=truncated-normal
    model.D.loc=1
    model.D.scale=0.1
    model.D.lo=0.8
    model.D.hi=1.2
    model.eta=1            # point mass shorthand
    model.alpha=1          # constant shorthand
    model.beta=1
    model.H0=3
    model.u0=cosine-bump
    grid.M=50
    grid.N=auto
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, replace
from pathlib import Path

from dotenv import dotenv_values

from core.defaults import (
    DEFAULT_K,
    DEFAULT_M,
    DEFAULT_SEED,
    DEFAULT_T,
    FT_EPS,
    HISTOGRAM_BINS,
    OUTCOME_TOL,
)
from core.errors import ConfigurationError, ModelViolationError
from core.model.constants import derive_constants
from core.model.schema import GrowthFunction, InitialCondition, ModelSpec, ScalarDistribution

__all__ = [
    "REQUIRED_KEYS",
    "RunParameters",
    "load_config_values",
    "parse_config",
    "render_config",
]

REQUIRED_KEYS = ("model.D", "model.eta", "model.alpha", "model.beta", "model.H0", "model.u0")

_DIST_FIELDS = {
    "point": ("loc",),
    "truncated-normal": ("loc", "scale", "lo", "hi"),
    "truncated-beta": ("a", "b", "lo", "hi"),
}
_DIST_KEYS = ("loc", "scale", "a", "b", "lo", "hi")

_GROWTH_FIELDS = {"constant": "value", "rational-affine": "coeffs", "tabulated": "table"}


@dataclass(frozen=True, slots=True)
class RunParameters:
    """Grid, Monte Carlo and classifier settings of one run.

    ``N = None`` selects the automatic step-size rule.
    """

    M: int = DEFAULT_M
    N: int | None = None
    T: float = DEFAULT_T
    K: int = DEFAULT_K
    seed: int = DEFAULT_SEED
    eps: float = FT_EPS
    tol: float = OUTCOME_TOL
    tail_window: int | None = None
    bins: int = HISTOGRAM_BINS

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ConfigurationError(f"grid.M must be >= 1, got {self.M}")
        if self.N is not None and self.N < 0:
            raise ConfigurationError(f"grid.N must be >= 0 or auto, got {self.N}")
        if not (math.isfinite(self.T) and self.T >= 0):
            raise ConfigurationError(f"grid.T must be finite and >= 0, got {self.T}")
        if self.K < 1:
            raise ConfigurationError(f"mc.K must be >= 1, got {self.K}")
        if self.seed < 0:
            raise ConfigurationError(f"mc.seed must be >= 0, got {self.seed}")
        if not 0.0 < self.eps < 1.0:
            raise ConfigurationError(f"ft.eps: eps must lie in (0,1), got {self.eps}")
        if not self.tol > 0:
            raise ConfigurationError(f"dichotomy.tol must be > 0, got {self.tol}")
        if self.tail_window is not None and self.tail_window < 2:
            raise ConfigurationError(
                f"dichotomy.tail_window must be >= 2, got {self.tail_window}"
            )
        if self.bins < 1:
            raise ConfigurationError(f"histogram.bins must be >= 1, got {self.bins}")

    def with_overrides(self, **overrides: object) -> RunParameters:
        """Copy with every non-``None`` override applied."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **changes) if changes else self


# ---------------------------------------------------------------------------
# Reading
# ---------------------------------------------------------------------------


class _Reader:
    """Consumes keys from the raw mapping and remembers which were used."""

    def __init__(self, values: Mapping[str, str | None], source: str) -> None:
        self.source = source
        self.values: dict[str, str] = {}
        for key, raw in values.items():
            if raw is None or not raw.strip():
                raise ConfigurationError(f"{source}: {key} has no value")
            self.values[key] = raw.strip()
        self.used: set[str] = set()

    def has(self, key: str) -> bool:
        return key in self.values

    def has_prefix(self, prefix: str) -> bool:
        return any(key.startswith(prefix + ".") for key in self.values)

    def text(self, key: str, default: str | None = None) -> str:
        if key not in self.values:
            if default is None:
                raise ConfigurationError(f"{self.source}: missing required key {key}")
            return default
        self.used.add(key)
        return self.values[key]

    def number(self, key: str, default: float | None = None) -> float:
        if key not in self.values and default is not None:
            return default
        raw = self.text(key)
        try:
            value = float(raw)
        except ValueError:
            raise ConfigurationError(f"{self.source}: {key} expects a number, got {raw!r}") from None
        if not math.isfinite(value):
            raise ConfigurationError(f"{self.source}: {key} must be finite, got {raw!r}")
        return value

    def integer(self, key: str, default: int | None = None) -> int | None:
        if key not in self.values:
            return default
        raw = self.text(key)
        try:
            return int(raw)
        except ValueError:
            raise ConfigurationError(f"{self.source}: {key} expects an integer, got {raw!r}") from None

    def unused(self) -> list[str]:
        return sorted(set(self.values) - self.used)


def _is_number(raw: str) -> bool:
    try:
        float(raw)
    except ValueError:
        return False
    return True


def _pairs(reader: _Reader, key: str) -> tuple[tuple[float, float], ...]:
    raw = reader.text(key)
    pairs: list[tuple[float, float]] = []
    for token in raw.split():
        r, sep, v = token.partition(":")
        if not sep:
            raise ConfigurationError(f"{reader.source}: {key} expects r:value pairs, got {token!r}")
        try:
            pairs.append((float(r), float(v)))
        except ValueError:
            raise ConfigurationError(f"{reader.source}: {key} has a malformed pair {token!r}") from None
    return tuple(pairs)


def _distribution(reader: _Reader, key: str) -> ScalarDistribution:
    if reader.has(key):
        if reader.has_prefix(key):
            raise ConfigurationError(f"{reader.source}: {key} shorthand cannot be combined with {key}.*")
        return ScalarDistribution.point(reader.number(key))

    kind = reader.text(f"{key}.kind")
    if kind not in _DIST_FIELDS:
        raise ConfigurationError(
            f"{reader.source}: {key}.kind must be one of {sorted(_DIST_FIELDS)}, got {kind!r}"
        )
    allowed = _DIST_FIELDS[kind]
    for name in _DIST_KEYS:
        if name not in allowed and reader.has(f"{key}.{name}"):
            raise ConfigurationError(f"{reader.source}: {key}.{name} does not apply to {kind}")
    p = {name: reader.number(f"{key}.{name}") for name in allowed}
    try:
        if kind == "point":
            return ScalarDistribution.point(p["loc"])
        if kind == "truncated-normal":
            return ScalarDistribution.truncated_normal(p["loc"], p["scale"], p["lo"], p["hi"])
        return ScalarDistribution.truncated_beta(p["a"], p["b"], p["lo"], p["hi"])
    except ConfigurationError as exc:
        raise ConfigurationError(f"{reader.source}: {key}: {exc}") from exc


def _growth(reader: _Reader, key: str) -> GrowthFunction:
    try:
        if reader.has(key):
            raw = reader.text(key)
            if not _is_number(raw):
                raise ConfigurationError(f"{key} expects a number or {key}.kind, got {raw!r}")
            if reader.has_prefix(key):
                raise ConfigurationError(f"{key} shorthand cannot be combined with {key}.*")
            return GrowthFunction.constant(float(raw))

        kind = reader.text(f"{key}.kind")
        if kind not in _GROWTH_FIELDS:
            raise ConfigurationError(f"{key}.kind must be one of {sorted(_GROWTH_FIELDS)}, got {kind!r}")
        for other_kind, name in _GROWTH_FIELDS.items():
            if other_kind != kind and reader.has(f"{key}.{name}"):
                raise ConfigurationError(f"{key}.{name} does not apply to {kind}")
        if kind == "constant":
            return GrowthFunction.constant(reader.number(f"{key}.value"))
        if kind == "rational-affine":
            raw = reader.text(f"{key}.coeffs")
            try:
                coeffs = [float(c) for c in raw.split(",")]
            except ValueError:
                raise ConfigurationError(f"{key}.coeffs expects p,q,s,t, got {raw!r}") from None
            if len(coeffs) != 4:
                raise ConfigurationError(f"{key}.coeffs expects four values p,q,s,t, got {raw!r}")
            return GrowthFunction.rational_affine(*coeffs)
        return GrowthFunction.tabulated(_pairs(reader, f"{key}.table"))
    except (ConfigurationError, ModelViolationError) as exc:
        message = str(exc)
        if not message.startswith(reader.source):
            message = f"{reader.source}: {key}: {message}"
        raise type(exc)(message) from exc


def _initial_condition(reader: _Reader) -> InitialCondition:
    H0 = reader.number("model.H0")
    kind = reader.text("model.u0")
    table: tuple[tuple[float, float], ...] = ()
    if kind == "tabulated":
        table = _pairs(reader, "model.u0.table")
    elif reader.has("model.u0.table"):
        raise ConfigurationError(f"{reader.source}: model.u0.table does not apply to {kind}")
    try:
        return InitialCondition(kind=kind, H0=H0, table=table)
    except (ConfigurationError, ModelViolationError) as exc:
        raise type(exc)(f"{reader.source}: model.u0: {exc}") from exc


def _run_parameters(reader: _Reader) -> RunParameters:
    raw_N = reader.text("grid.N", "auto")
    if raw_N == "auto":
        N = None
    else:
        try:
            N = int(raw_N)
        except ValueError:
            raise ConfigurationError(
                f"{reader.source}: grid.N expects an integer or auto, got {raw_N!r}"
            ) from None
    try:
        return RunParameters(
            M=reader.integer("grid.M", DEFAULT_M) or 0,
            N=N,
            T=reader.number("grid.T", DEFAULT_T),
            K=reader.integer("mc.K", DEFAULT_K) or 0,
            seed=reader.integer("mc.seed", DEFAULT_SEED) or 0,
            eps=reader.number("ft.eps", FT_EPS),
            tol=reader.number("dichotomy.tol", OUTCOME_TOL),
            tail_window=reader.integer("dichotomy.tail_window"),
            bins=reader.integer("histogram.bins", HISTOGRAM_BINS) or 0,
        )
    except ConfigurationError as exc:
        raise ConfigurationError(f"{reader.source}: {exc}") from exc


def load_config_values(
    values: Mapping[str, str | None], source: str = "<config>"
) -> tuple[ModelSpec, RunParameters]:
    """Validate a raw key/value mapping into a model and its run parameters."""
    if not values:
        raise ConfigurationError(f"{source}: empty config; required keys: {', '.join(REQUIRED_KEYS)}")
    reader = _Reader(values, source)
    missing = [key for key in REQUIRED_KEYS if not (reader.has(key) or reader.has_prefix(key))]
    if missing:
        raise ConfigurationError(f"{source}: missing required keys: {', '.join(missing)}")

    D_dist = _distribution(reader, "model.D")
    eta_dist = _distribution(reader, "model.eta")
    alpha = _growth(reader, "model.alpha")
    beta = _growth(reader, "model.beta")
    ic = _initial_condition(reader)
    r_max = reader.number("model.r_max") if reader.has("model.r_max") else None
    params = _run_parameters(reader)

    unknown = reader.unused()
    if unknown:
        raise ConfigurationError(f"{source}: unknown config keys: {', '.join(unknown)}")

    try:
        spec = ModelSpec(D_dist=D_dist, eta_dist=eta_dist, alpha=alpha, beta=beta, ic=ic, r_max=r_max)
        derive_constants(spec)
    except (ConfigurationError, ModelViolationError) as exc:
        raise type(exc)(f"{source}: {exc}") from exc
    return spec, params


def parse_config(path: str | Path) -> tuple[ModelSpec, RunParameters]:
    """Read and validate the config file at *path*.

    Raises
    ------
    ConfigurationError
        If the file is missing, has unknown keys or invalid values.
    ModelViolationError
        If the growth functions or the initial condition are not admissible.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    return load_config_values(dotenv_values(path, interpolate=False), str(path))


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    return repr(float(value))


def _dist_lines(key: str, dist: ScalarDistribution) -> list[str]:
    if dist.kind == "point":
        return [f"{key}={_fmt(dist.loc)}"]
    if dist.kind == "truncated-normal":
        fields = {"loc": dist.loc, "scale": dist.scale}
    else:
        fields = {"a": dist.shape_a, "b": dist.shape_b}
    fields |= {"lo": dist.support_lo, "hi": dist.support_hi}
    return [f"{key}.kind={dist.kind}"] + [f"{key}.{name}={_fmt(v)}" for name, v in fields.items()]


def _table(pairs: tuple[tuple[float, float], ...]) -> str:
    return '"' + " ".join(f"{_fmt(r)}:{_fmt(v)}" for r, v in pairs) + '"'


def _growth_lines(key: str, g: GrowthFunction) -> list[str]:
    if g.kind == "constant":
        return [f"{key}={_fmt(g.value)}"]
    if g.kind == "rational-affine":
        return [f"{key}.kind={g.kind}", f"{key}.coeffs={','.join(_fmt(c) for c in g.coeffs)}"]
    return [f"{key}.kind={g.kind}", f"{key}.table={_table(g.table)}"]


def render_config(spec: ModelSpec, params: RunParameters) -> str:
    """Config file text that :func:`parse_config` reads back to the same run."""
    lines = [
        *_dist_lines("model.D", spec.D_dist),
        *_dist_lines("model.eta", spec.eta_dist),
        *_growth_lines("model.alpha", spec.alpha),
        *_growth_lines("model.beta", spec.beta),
        f"model.H0={_fmt(spec.H0)}",
        f"model.u0={spec.ic.kind}",
    ]
    if spec.ic.kind == "tabulated":
        lines.append(f"model.u0.table={_table(spec.ic.table)}")
    if spec.r_max is not None:
        lines.append(f"model.r_max={_fmt(spec.r_max)}")
    lines += [
        f"grid.M={params.M}",
        f"grid.N={'auto' if params.N is None else params.N}",
        f"grid.T={_fmt(params.T)}",
        f"mc.K={params.K}",
        f"mc.seed={params.seed}",
        f"ft.eps={_fmt(params.eps)}",
        f"dichotomy.tol={_fmt(params.tol)}",
    ]
    if params.tail_window is not None:
        lines.append(f"dichotomy.tail_window={params.tail_window}")
    lines.append(f"histogram.bins={params.bins}")
    return "\n".join(lines) + "\n"
