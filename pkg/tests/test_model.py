"""Tests for core.model: schema validation, sampling and derived constants."""

from __future__ import annotations

import math

import numpy as np
import pytest

from core.errors import ConfigurationError, ModelViolationError
from core.model.constants import default_working_domain, derive_constants, growth_bounds
from core.model.sampling import realization_rng, sample_distribution, sample_parameters
from core.model.schema import GrowthFunction, InitialCondition, ModelSpec, ScalarDistribution

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _make_spec(**kwargs) -> ModelSpec:
    defaults = dict(
        D_dist=ScalarDistribution.truncated_normal(1.0, 0.1, 0.8, 1.2),
        eta_dist=ScalarDistribution.truncated_beta(2.0, 4.0, 1.6, 2.4),
        alpha=GrowthFunction.constant(1.0),
        beta=GrowthFunction.constant(1.0),
        ic=InitialCondition(kind="cosine-bump", H0=3.0),
    )
    defaults.update(kwargs)
    return ModelSpec(**defaults)


def _make_variable_spec() -> ModelSpec:
    return _make_spec(
        alpha=GrowthFunction.rational_affine(2.0, 3.0, 2.0, 2.0),
        beta=GrowthFunction.rational_affine(2.0, 1.0, 2.0, 2.0),
        ic=InitialCondition(kind="parabolic-bump", H0=3.0),
    )


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------


def test_point_distribution_is_degenerate():
    dist = ScalarDistribution.point(1.0)
    assert dist.is_degenerate
    assert dist.support_lo == dist.support_hi == 1.0


@pytest.mark.parametrize(
    "kwargs, match",
    [
        (dict(kind="truncated-normal", loc=1.0, scale=-0.1, support_lo=0.8, support_hi=1.2), "scale"),
        (dict(kind="truncated-beta", shape_a=0.0, shape_b=4.0, support_lo=1.6, support_hi=2.4), "shapes"),
        (dict(kind="truncated-normal", loc=1.0, scale=0.1, support_lo=1.2, support_hi=0.8), "lo < hi"),
        (dict(kind="uniform", support_lo=0.0, support_hi=1.0), "unknown distribution"),
    ],
)
def test_invalid_distribution_parameters(kwargs, match):
    with pytest.raises(ConfigurationError, match=match):
        ScalarDistribution(**kwargs)


def test_samples_stay_in_support():
    spec = _make_spec()
    for index in range(200):
        D, eta = sample_parameters(spec, realization_rng(7, index))
        assert 0.8 <= D <= 1.2
        assert 1.6 <= eta <= 2.4


def test_realization_stream_depends_only_on_seed_and_index():
    spec = _make_spec()
    first = sample_parameters(spec, realization_rng(3, 11))
    for index in range(11):
        sample_parameters(spec, realization_rng(3, index))
    assert sample_parameters(spec, realization_rng(3, 11)) == first
    assert sample_parameters(spec, realization_rng(4, 11)) != first


def test_truncated_beta_sample_mean():
    dist = ScalarDistribution.truncated_beta(2.0, 4.0, 1.6, 2.4)
    rng = np.random.default_rng(0)
    draws = np.array([sample_distribution(dist, rng) for _ in range(20_000)])
    # Beta(2, 4) has mean 1/3
    assert draws.mean() == pytest.approx(1.6 + 0.8 / 3.0, abs=5e-3)


def test_truncated_normal_with_no_mass_raises():
    dist = ScalarDistribution.truncated_normal(0.0, 1e-3, 10.0, 11.0)
    with pytest.raises(ConfigurationError, match="rejected"):
        sample_distribution(dist, np.random.default_rng(0))


def test_negative_seed_rejected():
    with pytest.raises(ConfigurationError):
        realization_rng(-1, 0)


# ---------------------------------------------------------------------------
# Growth functions and initial conditions
# ---------------------------------------------------------------------------


def test_rational_affine_evaluation():
    alpha = GrowthFunction.rational_affine(2.0, 3.0, 2.0, 2.0)
    assert alpha(0.0) == pytest.approx(1.5)
    assert alpha(np.array([1.0, 3.0])) == pytest.approx([1.25, 9.0 / 8.0])
    assert not alpha.is_constant
    assert GrowthFunction.rational_affine(2.0, 2.0, 1.0, 1.0).is_constant


def test_tabulated_growth_refuses_extrapolation():
    alpha = GrowthFunction.tabulated([(0.0, 1.0), (2.0, 2.0)])
    assert alpha(1.0) == pytest.approx(1.5)
    with pytest.raises(ModelViolationError, match="outside knots"):
        alpha(2.5)


def test_non_positive_constant_growth_rejected():
    with pytest.raises(ModelViolationError):
        GrowthFunction.constant(0.0)


def test_cosine_bump_shape():
    ic = InitialCondition(kind="cosine-bump", H0=3.0)
    assert ic(0.0) == pytest.approx(1.0)
    assert ic(1.5) == pytest.approx(math.cos(math.pi / 4.0))
    assert ic(3.0) == 0.0
    assert ic.front_slope() == pytest.approx(-math.pi / 6.0)


def test_tabulated_ic_must_vanish_at_front():
    with pytest.raises(ModelViolationError, match="u0\\(H0\\)"):
        InitialCondition(kind="tabulated", H0=2.0, table=((0.0, 1.0), (1.0, 0.5), (2.0, 0.1)))


def test_model_spec_derives_support_bounds():
    spec = _make_spec()
    assert spec.d1 == 0.8
    assert spec.d2 == 1.2
    assert spec.eta0 == 1.6
    assert spec.H0 == 3.0
    assert not spec.is_deterministic


def test_model_spec_rejects_non_positive_diffusion():
    with pytest.raises(ConfigurationError, match="D support"):
        _make_spec(D_dist=ScalarDistribution.point(0.0))


# ---------------------------------------------------------------------------
# Derived constants
# ---------------------------------------------------------------------------


def test_constants_constant_case():
    consts = derive_constants(_make_spec())
    assert (consts.alpha1, consts.alpha2, consts.beta1, consts.beta2) == (1.0, 1.0, 1.0, 1.0)
    assert consts.C0 == pytest.approx(1.0)
    assert consts.Cm == pytest.approx(1.0)
    assert consts.M0 == 1.0
    assert consts.P0 == pytest.approx(1.0)


def test_constants_variable_case():
    consts = derive_constants(_make_variable_spec())
    assert consts.alpha1 == pytest.approx(1.0)
    assert consts.alpha2 == pytest.approx(1.5)
    assert consts.beta1 == pytest.approx(0.5)
    assert consts.beta2 == pytest.approx(1.0)
    # alpha / beta = (2r + 3) / (2r + 1)
    assert consts.C0 == pytest.approx(3.0)
    assert consts.Cm == pytest.approx(1.0)
    assert consts.P0 == pytest.approx(3.0)


def test_growth_bounds_tabulated_scan():
    g = GrowthFunction.tabulated([(0.0, 2.0), (1.0, 0.5), (4.0, 3.0)])
    lo, hi = growth_bounds(g, r_max=2.0)
    assert lo == pytest.approx(0.5)
    assert hi == pytest.approx(2.0)


def test_pole_on_domain_rejected():
    spec = _make_spec(alpha=GrowthFunction.rational_affine(0.0, 1.0, 1.0, -1.0))
    with pytest.raises(ModelViolationError, match="pole"):
        derive_constants(spec)


def test_unbounded_growth_rejected():
    spec = _make_spec(alpha=GrowthFunction.rational_affine(1.0, 1.0, 0.0, 1.0))
    with pytest.raises(ModelViolationError, match="unbounded"):
        derive_constants(spec)


def test_default_working_domain():
    assert default_working_domain(_make_spec()) == pytest.approx(33.0)
    assert default_working_domain(_make_spec(r_max=5.0)) == 5.0
