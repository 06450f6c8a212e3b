"""Tests for core.analysis: spline resampling, error metrics and ladders."""

from __future__ import annotations

import numpy as np
import pytest

from core.analysis.convergence import k_ladder, ladder_reports
from core.analysis.metrics import (
    ErrorReport,
    absdev_front_moments,
    mean_radius_map,
    pairwise_error,
    relerr_ff_ft,
)
from core.analysis.spline import profile_knots, spline_resample
from core.ensemble.accumulator import EnsembleStats
from core.ensemble.runner import EnsembleConfig, run_ensemble, run_realizations
from core.errors import ConfigurationError
from core.model.schema import GrowthFunction, InitialCondition, ModelSpec, ScalarDistribution

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _make_spec() -> ModelSpec:
    return ModelSpec(
        D_dist=ScalarDistribution.truncated_normal(1.0, 0.1, 0.8, 1.2),
        eta_dist=ScalarDistribution.truncated_beta(2.0, 4.0, 1.6, 2.4),
        alpha=GrowthFunction.constant(1.0),
        beta=GrowthFunction.constant(1.0),
        ic=InitialCondition(kind="cosine-bump", H0=3.0),
    )


def _make_stats(mean_u, mean_H, method: str = "FF", h: float = 0.25, std_scale: float = 0.1) -> EnsembleStats:
    mean_u = np.asarray(mean_u, dtype=float)
    mean_H = np.asarray(mean_H, dtype=float)
    if method == "FF":
        grid = np.arange(mean_u.size) / (mean_u.size - 1)
    else:
        grid = np.arange(mean_u.size) * h
    return EnsembleStats(
        method=method,
        K_effective=10,
        grid=grid,
        mean_u=mean_u,
        std_u=std_scale * mean_u,
        times=np.linspace(0.0, 1.0, mean_H.size),
        mean_H=mean_H,
        std_H=std_scale * (mean_H - mean_H[0]),
        h=h,
        k=1.0 / max(mean_H.size - 1, 1),
        I_max=mean_u.size if method == "FT" else None,
    )


# ---------------------------------------------------------------------------
# Spline resampling
# ---------------------------------------------------------------------------


def test_spline_reproduces_linear_data():
    r = np.linspace(0.0, 3.0, 7)
    v = 1.0 - r / 3.0
    q = np.array([0.1, 1.25, 2.9])
    assert spline_resample(r, v, q) == pytest.approx(1.0 - q / 3.0, abs=1e-12)


def test_spline_is_zero_beyond_the_front():
    r = np.linspace(0.0, 3.0, 7)
    out = spline_resample(r, np.cos(r * np.pi / 6.0), [3.0, 3.5])
    assert out[0] == pytest.approx(0.0, abs=1e-12)
    assert out[1] == 0.0


@pytest.mark.parametrize(
    "radii, query, match",
    [
        ([0.0, 1.0, 2.0], [0.5], "knots"),
        ([0.0, 1.0, 1.0, 2.0], [0.5], "increasing"),
        ([0.5, 1.0, 1.5, 2.0], [0.1], "below"),
    ],
)
def test_spline_rejects_bad_input(radii, query, match):
    with pytest.raises(ConfigurationError, match=match):
        spline_resample(radii, np.ones(len(radii)), query)


# ---------------------------------------------------------------------------
# FF vs FT
# ---------------------------------------------------------------------------


def test_relerr_of_a_method_against_itself_is_zero():
    cfg = EnsembleConfig(spec=_make_spec(), method="FF", K=3, M=10, T=0.05)
    runs = run_realizations(cfg)
    assert relerr_ff_ft(runs, runs) == pytest.approx(0.0, abs=1e-12)


def test_relerr_ff_ft_small_on_short_horizon():
    spec = _make_spec()
    ff = run_realizations(EnsembleConfig(spec=spec, method="FF", K=3, M=50, N=500, T=0.1))
    ft = run_realizations(EnsembleConfig(spec=spec, method="FT", K=3, M=50, N=500, T=0.1))
    radii, _ = profile_knots(ft[0])
    assert radii[-1] == pytest.approx(ft[0].front)
    assert relerr_ff_ft(ff, ft, T=0.1) < 0.05


def test_relerr_requires_matched_realizations():
    spec = _make_spec()
    ff = run_realizations(EnsembleConfig(spec=spec, method="FF", K=2, M=10, T=0.05))
    ft = run_realizations(EnsembleConfig(spec=spec, method="FT", K=2, seed=9, M=10, T=0.05))
    with pytest.raises(ConfigurationError, match="matched|does not match"):
        relerr_ff_ft(ff, ft[:1])
    with pytest.raises(ConfigurationError, match="does not match"):
        relerr_ff_ft(ff, ft)


def test_absdev_front_moments():
    ff = _make_stats([1.0, 0.5, 0.0], [3.0, 3.2, 3.5])
    ft = _make_stats([1.0, 0.5], [3.0, 3.1, 3.6], method="FT")
    dev_mean, dev_std = absdev_front_moments(ff, ft)
    assert dev_mean == pytest.approx([0.0, 0.1, 0.1])
    assert dev_std == pytest.approx([0.0, 0.01, 0.01])
    with pytest.raises(ConfigurationError, match="time grids"):
        absdev_front_moments(ff, _make_stats([1.0, 0.5], [3.0, 3.1], method="FT"))


# ---------------------------------------------------------------------------
# Pairwise errors
# ---------------------------------------------------------------------------


def test_pairwise_error_on_nested_spatial_grids():
    coarse = _make_stats([1.0, 0.5, 0.0], [3.0, 3.2])
    fine = _make_stats([1.0, 0.8, 0.4, 0.2, 0.0], [3.0, 3.2])
    assert pairwise_error(coarse, fine, "u", "mean") == pytest.approx(0.1)
    assert pairwise_error(coarse, fine, "H", "mean") == 0.0


def test_pairwise_error_on_nested_time_grids():
    coarse = _make_stats([1.0, 0.5, 0.0], [3.0, 3.2, 3.4])
    fine = _make_stats([1.0, 0.5, 0.0], [3.0, 3.1, 3.25, 3.3, 3.4])
    assert pairwise_error(coarse, fine, "H", "mean") == pytest.approx(0.05)


def test_pairwise_error_pads_ft_profiles():
    a = _make_stats([1.0, 0.6], [3.0, 3.1], method="FT")
    b = _make_stats([1.0, 0.6, 0.2], [3.0, 3.1], method="FT")
    assert pairwise_error(a, b, "u", "mean") == pytest.approx(0.2)


def test_pairwise_error_rejects_non_nested_grids():
    a = _make_stats([1.0, 0.5, 0.0], [3.0, 3.2])
    b = _make_stats([1.0, 0.7, 0.3, 0.0], [3.0, 3.2])
    with pytest.raises(ConfigurationError, match="not nested"):
        pairwise_error(a, b, "u", "mean")


def test_pairwise_error_rejects_mixed_methods_and_unknown_moments():
    ff = _make_stats([1.0, 0.5, 0.0], [3.0, 3.2])
    ft = _make_stats([1.0, 0.5], [3.0, 3.2], method="FT")
    with pytest.raises(ConfigurationError, match="cannot compare"):
        pairwise_error(ff, ft, "u", "mean")
    with pytest.raises(ConfigurationError, match="unknown"):
        pairwise_error(ff, ff, "u", "variance")


def test_error_report_rejects_negative_values():
    with pytest.raises(ConfigurationError):
        ErrorReport(metric="K:mean[u]", value=-1.0)
    row = ErrorReport(metric="K:mean[u]", value=0.5, pair=(10, 20), T=1.0).to_row()
    assert row["pair"] == "10-20"


# ---------------------------------------------------------------------------
# Mean-radius mapping and ladders
# ---------------------------------------------------------------------------


def test_mean_radius_map_zero_at_front():
    stats = _make_stats([1.0, 0.6, 0.3, 0.1, 0.0], [3.0, 3.4])
    mapped = mean_radius_map(stats)
    assert mapped.final_radii == pytest.approx([0.0, 0.85, 1.7, 2.55, 3.4])
    assert mapped.mean[-1] == 0.0
    assert mapped.std[-1] == 0.0
    with pytest.raises(ConfigurationError):
        mean_radius_map(_make_stats([1.0, 0.5], [3.0, 3.1], method="FT"))


def test_ladder_reports_cover_every_pair_quantity_and_moment():
    stats = [_make_stats([1.0, 0.5, 0.0], [3.0, 3.0 + 0.1 * i]) for i in range(3)]
    reports = ladder_reports("K", [10, 20, 40], stats, T=1.0)
    assert len(reports) == 2 * 4
    assert {r.metric for r in reports} == {"K:mean[u]", "K:std[u]", "K:mean[H]", "K:std[H]"}
    assert reports[-1].pair == (20, 40)


@pytest.mark.parametrize("values", [[10], [20, 10], [10, 10]])
def test_ladder_must_be_strictly_increasing(values):
    with pytest.raises(ConfigurationError, match="ladder"):
        k_ladder(_make_spec(), values)


def test_small_k_ladder():
    reports = k_ladder(_make_spec(), (2, 4), M=10, N=None, T=0.05)
    assert len(reports) == 4
    assert all(r.pair == (2, 4) for r in reports)
    assert all(r.value >= 0 for r in reports)


def test_k_ladder_reuses_the_smaller_ensemble():
    spec = _make_spec()
    reports = k_ladder(spec, (3, 6), M=10, N=None, T=0.05)
    separate = [
        run_ensemble(EnsembleConfig(spec=spec, method="FF", K=K, M=10, T=0.05)) for K in (3, 6)
    ]
    expected = ladder_reports("K", [3, 6], separate, T=0.05)
    for got, want in zip(reports, expected, strict=True):
        assert got.metric == want.metric
        assert got.value == pytest.approx(want.value, rel=1e-9, abs=1e-13)
