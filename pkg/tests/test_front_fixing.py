"""Tests for the front-fixing scheme (core/solvers/front_fixing.py)."""

from __future__ import annotations

import math

import numpy as np
import pytest

from core.errors import (
    ConfigurationError,
    FrontCollapseError,
    InvariantViolationError,
    StabilityError,
)
from core.model.constants import derive_constants
from core.model.sampling import ParameterSample, realization_rng, sample_parameters
from core.model.schema import GrowthFunction, InitialCondition, ModelSpec, ScalarDistribution
from core.solvers.front_fixing import (
    FFGrid,
    FFState,
    ff_auto_grid,
    ff_coefficients,
    ff_front_update,
    ff_solve,
    ff_stability_limit,
)

# ── Helpers ───────────────────────────────────────────────────────────────


def _make_spec(deterministic: bool = False, variable: bool = False) -> ModelSpec:
    if deterministic:
        D_dist = eta_dist = ScalarDistribution.point(1.0)
    else:
        D_dist = ScalarDistribution.truncated_normal(1.0, 0.1, 0.8, 1.2)
        eta_dist = ScalarDistribution.truncated_beta(2.0, 4.0, 1.6, 2.4)
    if variable:
        return ModelSpec(
            D_dist=D_dist,
            eta_dist=eta_dist,
            alpha=GrowthFunction.rational_affine(2.0, 3.0, 2.0, 2.0),
            beta=GrowthFunction.rational_affine(2.0, 1.0, 2.0, 2.0),
            ic=InitialCondition(kind="parabolic-bump", H0=3.0),
        )
    return ModelSpec(
        D_dist=D_dist,
        eta_dist=eta_dist,
        alpha=GrowthFunction.constant(1.0),
        beta=GrowthFunction.constant(1.0),
        ic=InitialCondition(kind="cosine-bump", H0=3.0),
    )


# ── Stability limit ───────────────────────────────────────────────────────


def test_stability_limit_deterministic_constant_case():
    spec = _make_spec(deterministic=True)
    k = ff_stability_limit(spec, derive_constants(spec), 1.0 / 50)
    assert 1.59e-3 <= k <= 1.60e-3


def test_stability_limit_random_constant_case():
    spec = _make_spec()
    k = ff_stability_limit(spec, derive_constants(spec), 1.0 / 50)
    assert k == pytest.approx(1.330e-3, abs=1e-6)


def test_stability_limit_shrinks_with_h():
    spec = _make_spec()
    consts = derive_constants(spec)
    assert ff_stability_limit(spec, consts, 1.0 / 100) < ff_stability_limit(spec, consts, 1.0 / 50)


def test_step_above_limit_raises():
    spec = _make_spec(deterministic=True)
    grid = FFGrid(M=50, N=100, T=1.0)  # k = 1e-2
    with pytest.raises(StabilityError, match="exceeds"):
        ff_solve(spec, ParameterSample(1.0, 1.0), grid)


# ── Local updates ─────────────────────────────────────────────────────────


def test_coefficient_identities():
    rng = np.random.default_rng(5)
    z = np.linspace(0.05, 0.95, 19)
    a = rng.uniform(1.0, 1.5, z.size)
    b = rng.uniform(0.5, 1.0, z.size)
    v = rng.uniform(0.0, 1.0, z.size)
    D, k, h, g_n, g_next = 1.1, 1e-3, 0.05, 9.0, 9.01
    A, B, C = ff_coefficients(D, k, h, g_n, g_next, z, a, b, v)
    assert np.allclose(A + C, 2.0 * D * k / (h * h * g_n), rtol=0, atol=1e-14)
    assert np.allclose(A + B + C, 1.0 + k * (a - b * v), rtol=0, atol=1e-14)


def test_front_update_from_one_sided_gradient():
    v = np.array([1.0, 0.9, 0.6, 0.3, 0.0])
    state = FFState(v=v, g=4.0)
    g_next = ff_front_update(state, eta=2.0, k=1e-3, h=0.25)
    assert g_next == pytest.approx(4.0 + (1e-3 / 0.25) * 2.0 * (4 * 0.3 - 0.6))


def test_front_collapse_raises():
    v = np.array([1.0, 1.0, 1.0, -10.0, 0.0])
    with pytest.raises(FrontCollapseError):
        ff_front_update(FFState(v=v, g=1e-6), eta=1.0, k=1.0, h=0.25)


def test_state_requires_zero_front_value():
    with pytest.raises(InvariantViolationError, match="v_M must be 0"):
        FFState(v=np.array([1.0, 0.5, 0.1]), g=1.0)


def test_grid_rejects_too_few_intervals():
    with pytest.raises(ConfigurationError, match="M must be"):
        FFGrid(M=2, N=10, T=1.0)


# ── Full solves ───────────────────────────────────────────────────────────


def test_zero_horizon_returns_initial_condition():
    spec = _make_spec(deterministic=True)
    grid = FFGrid(M=50, N=0, T=0.0)
    result = ff_solve(spec, ParameterSample(1.0, 1.0), grid)
    assert result.levels == 0
    assert np.array_equal(result.values, spec.ic(grid.z * 3.0))
    assert result.H.tolist() == [3.0]
    assert result.node_count == 51


def test_auto_grid_respects_limit():
    spec = _make_spec()
    grid = ff_auto_grid(spec, M=20, T=0.5)
    limit = ff_stability_limit(spec, derive_constants(spec), grid.h)
    assert grid.k <= limit
    assert grid.N * grid.k == pytest.approx(0.5)


@pytest.mark.parametrize("variable", [False, True])
def test_positivity_monotonicity_and_growing_front(variable):
    spec = _make_spec(variable=variable)
    consts = derive_constants(spec)
    grid = ff_auto_grid(spec, M=20, T=0.5, consts=consts)
    for index in range(100):
        sample = sample_parameters(spec, realization_rng(1, index))
        result = ff_solve(spec, sample, grid, consts=consts, index=index)
        assert np.all(result.values >= 0)
        assert result.values[-1] == 0.0
        assert np.all(np.diff(result.values) <= 1e-14)
        assert np.all(np.diff(result.H) > 0)
        assert result.front_retreats == 0
        assert np.allclose(result.radii, grid.z * result.front)
        assert result.peak.max() <= max(consts.M0, consts.C0) + 1e-12


def test_peak_tracks_origin_value():
    spec = _make_spec(deterministic=True)
    grid = ff_auto_grid(spec, M=20, T=0.2)
    result = ff_solve(spec, ParameterSample(1.0, 1.0), grid)
    assert result.peak[0] == pytest.approx(1.0)
    assert result.peak[-1] == pytest.approx(result.values.max())
    assert result.times[-1] == pytest.approx(0.2)


def test_front_speed_scales_with_eta():
    spec = _make_spec(deterministic=True)
    grid = ff_auto_grid(spec, M=20, T=0.5)
    slow = ff_solve(spec, ParameterSample(1.0, 1.0), grid)
    fast = ff_solve(spec, ParameterSample(1.0, 2.0), grid)
    assert fast.front > slow.front > 3.0
    assert math.isfinite(fast.front)


@pytest.mark.parametrize("variable", [False, True])
def test_front_ordered_by_eta_at_every_level(variable):
    spec = _make_spec(variable=variable)
    consts = derive_constants(spec)
    grid = ff_auto_grid(spec, M=20, T=1.0, consts=consts)
    small = ff_solve(spec, ParameterSample(1.0, 1.6), grid, consts=consts)
    large = ff_solve(spec, ParameterSample(1.0, 2.4), grid, consts=consts)
    assert np.all(small.H <= large.H)
    assert small.front < large.front
