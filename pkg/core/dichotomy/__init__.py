"""Spreading-vanishing threshold and outcome classification."""

from core.dichotomy.outcome import Outcome, classify_outcome
from core.dichotomy.threshold import (
    SpreadingGuarantee,
    ThresholdResult,
    rstar,
    rstar_analytic,
    rstar_numeric,
    spreading_guarantee,
)

__all__ = [
    "Outcome",
    "SpreadingGuarantee",
    "ThresholdResult",
    "classify_outcome",
    "rstar",
    "rstar_analytic",
    "rstar_numeric",
    "spreading_guarantee",
]
