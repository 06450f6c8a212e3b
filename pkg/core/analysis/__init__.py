"""Cross-method comparison and convergence diagnostics."""

from core.analysis.convergence import k_ladder, ladder_reports, m_ladder, n_ladder
from core.analysis.metrics import (
    ErrorReport,
    MeanRadiusMap,
    absdev_front_moments,
    mean_radius_map,
    pairwise_error,
    relerr_ff_ft,
)
from core.analysis.spline import profile_knots, spline_resample

__all__ = [
    "ErrorReport",
    "MeanRadiusMap",
    "absdev_front_moments",
    "k_ladder",
    "ladder_reports",
    "m_ladder",
    "mean_radius_map",
    "n_ladder",
    "pairwise_error",
    "profile_knots",
    "relerr_ff_ft",
    "spline_resample",
]
