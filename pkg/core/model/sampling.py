"""Sampling of the bounded random parameters ``D`` and ``eta``.

Every realization owns an independent ``numpy`` stream derived from
``SeedSequence(seed, spawn_key=(index,))``, so realization ``index`` draws
the same parameters whatever order (or process) it runs in.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from core.defaults import MAX_REJECTION_DRAWS
from core.errors import ConfigurationError
from core.model.schema import ModelSpec, ScalarDistribution

__all__ = [
    "ParameterSample",
    "realization_rng",
    "sample_distribution",
    "sample_parameters",
]


class ParameterSample(NamedTuple):
    D: float
    eta: float


def realization_rng(seed: int, index: int) -> np.random.Generator:
    """Return the private generator of realization *index* under *seed*."""
    if seed < 0 or index < 0:
        raise ConfigurationError(f"seed and index must be non-negative, got seed={seed}, index={index}")
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def sample_distribution(dist: ScalarDistribution, rng: np.random.Generator) -> float:
    """Draw one value of *dist* from *rng*.

    Truncated normals are drawn by rejection against the untruncated law;
    betas are drawn on [0, 1] and mapped affinely onto the support.
    """
    if dist.kind == "point":
        return dist.loc

    lo, hi = dist.support_lo, dist.support_hi
    if dist.kind == "truncated-beta":
        x = lo + (hi - lo) * float(rng.beta(dist.shape_a, dist.shape_b))
        return min(max(x, lo), hi)

    for _ in range(MAX_REJECTION_DRAWS):
        x = float(rng.normal(dist.loc, dist.scale))
        if lo <= x <= hi:
            return x
    raise ConfigurationError(
        f"truncated normal N({dist.loc}, {dist.scale}) on [{lo}, {hi}] rejected "
        f"{MAX_REJECTION_DRAWS} consecutive draws; the support carries almost no mass"
    )


def sample_parameters(spec: ModelSpec, rng: np.random.Generator) -> ParameterSample:
    """Draw ``(D, eta)`` for one realization, always ``D`` first."""
    D = sample_distribution(spec.D_dist, rng)
    eta = sample_distribution(spec.eta_dist, rng)
    return ParameterSample(D=D, eta=eta)
