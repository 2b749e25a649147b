"""Exception and warning types shared across the package."""

from __future__ import annotations


class DpplnError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(DpplnError, ValueError):
    """An argument lies outside the region where a function is defined."""


class BranchCutError(DomainError):
    """Evaluation point sits on a branch cut."""


class PoleError(DomainError):
    """Evaluation point is too close to a pole."""


class RegionError(DomainError):
    """A point (tau, chi) lies outside the liquid region."""


class ParityError(DomainError):
    """A lattice displacement violates the half-integer parity rule."""


class ParameterError(DpplnError, ValueError):
    """Invalid model parameter (alpha <= 0, q outside (0, 1), ...)."""


class ConvergenceError(DpplnError, RuntimeError):
    """A quadrature rule hit its node cap before reaching tolerance."""

    def __init__(self, message: str, value: complex | None = None, error_estimate: float | None = None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class OverlapError(DpplnError, ValueError):
    """Two objects that must be disjoint intersect."""


class CoverageError(DpplnError, ValueError):
    """A configuration window does not cover the sites a statistic needs."""


class TailTooLargeError(DpplnError, RuntimeError):
    """An enumeration oracle cannot certify the requested accuracy."""


class DegeneracyError(DpplnError, RuntimeError):
    """A sequential sampler met a pivot it cannot process reliably."""


class ConfigError(DpplnError, ValueError):
    """Invalid run configuration; carries the key path or line when known."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        parts = [message]
        if key is not None:
            parts.insert(0, f"{key}:")
        if line is not None:
            parts.insert(0, f"line {line}:")
        super().__init__(" ".join(parts))
        self.message = message
        self.key = key
        self.line = line


class TangencyWarning(UserWarning):
    """An arc endpoint is a double root of zG'(z) - u."""


class ConditioningWarning(UserWarning):
    """A computation is close to a boundary where it becomes ill-conditioned."""


class TruncationWarning(UserWarning):
    """A truncated series left a tail above its nominal threshold."""


class ClampWarning(UserWarning):
    """A probability left [0, 1] by more than rounding and was clamped."""
