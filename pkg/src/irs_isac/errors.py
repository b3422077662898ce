"""Exception types raised across the package."""

from __future__ import annotations


class IsacError(Exception):
    """Base class for all package errors."""


class InvalidInputError(IsacError, ValueError):
    """An argument is outside its documented domain."""


class StateOutOfDomainError(IsacError, ValueError):
    """A propagated vehicle state left the valid (phi, d) domain."""


class InfeasibleSensingError(IsacError, ValueError):
    """Sensing SNR is non-positive, so no angle measurement is available."""


class DegenerateFilterError(IsacError, ValueError):
    """Both Kalman variances are zero."""


class DegenerateVarianceError(IsacError, ValueError):
    """A zero variance was passed where the series needs y > 0."""


class DegenerateProjectionError(IsacError, ValueError):
    """Projection towards the simplex is undefined (sum(eta) <= sum(lower))."""


class InfeasibleProblemError(IsacError):
    """The sensing thresholds cannot all be met.

    Attributes:
        threshold: largest sensing threshold for which the problem is feasible.
        gamma_th: the requested threshold.
    """

    def __init__(self, threshold: float, gamma_th: float):
        self.threshold = threshold
        self.gamma_th = gamma_th
        super().__init__(
            f"infeasible: gamma_th={gamma_th:.6g} exceeds max feasible echo SNR {threshold:.6g}"
        )


class ResourceLimitError(IsacError, RuntimeError):
    """Polyblock vertex set grew past its cap."""


class ConfigError(IsacError, ValueError):
    """Scenario configuration could not be read or validated."""
