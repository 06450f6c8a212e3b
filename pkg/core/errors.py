"""Exception hierarchy shared by every layer of the solver suite."""

from __future__ import annotations

__all__ = [
    "ConfigurationError",
    "DomainExhaustedError",
    "EnsembleError",
    "FrontCollapseError",
    "IncompatibleEnsembleError",
    "InvariantViolationError",
    "ModelViolationError",
    "NoRootFoundError",
    "StabilityError",
    "StefanModelError",
]


class StefanModelError(RuntimeError):
    pass


class ConfigurationError(StefanModelError, ValueError):
    pass


class ModelViolationError(StefanModelError):
    pass


class StabilityError(StefanModelError):
    pass


class FrontCollapseError(StefanModelError):
    pass


class InvariantViolationError(StefanModelError):
    pass


class DomainExhaustedError(StefanModelError):
    pass


class NoRootFoundError(StefanModelError):
    pass


class IncompatibleEnsembleError(StefanModelError):
    pass


class EnsembleError(StefanModelError):
    """A single realization failed inside an ensemble run."""

    def __init__(self, index: int, cause: BaseException) -> None:
        super().__init__(f"realization {index} failed: {type(cause).__name__}: {cause}")
        self.index = index
        self.cause = cause

    def __reduce__(self):
        return (self.__class__, (self.index, self.cause))
