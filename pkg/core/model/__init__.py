"""Problem instance, random parameters and derived bounds."""

from core.model.constants import (
    DerivedConstants,
    default_working_domain,
    derive_constants,
    growth_bounds,
)
from core.model.sampling import (
    ParameterSample,
    realization_rng,
    sample_distribution,
    sample_parameters,
)
from core.model.schema import (
    GrowthFunction,
    InitialCondition,
    ModelSpec,
    ScalarDistribution,
    evaluate_growth,
)

__all__ = [
    "DerivedConstants",
    "GrowthFunction",
    "InitialCondition",
    "ModelSpec",
    "ParameterSample",
    "ScalarDistribution",
    "default_working_domain",
    "derive_constants",
    "evaluate_growth",
    "growth_bounds",
    "realization_rng",
    "sample_distribution",
    "sample_parameters",
]
