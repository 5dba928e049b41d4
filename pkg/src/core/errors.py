"""
Exception hierarchy for adiavac.

Every error raised by the numerical core derives from AdiavacError so the
command-line front end can map it onto an exit code.
"""

from __future__ import annotations

from typing import Any, List, Optional


class AdiavacError(Exception):
    """Base class for all adiavac errors."""

    exit_code = 1


# jets


class BasePointMismatch(AdiavacError):
    """Two jets expanded around different points were combined."""


class DivisionByZeroJet(AdiavacError):
    """Division by a jet whose leading coefficient vanishes."""


class NonPositiveLeadingCoefficient(AdiavacError):
    """sqrt/log/powf of a jet whose value is not strictly positive."""


class OrderExhausted(AdiavacError):
    """Not enough Taylor orders left for the requested derivative.

    ``order`` is the adiabatic order that could not be reached, when known.
    """

    exit_code = 3

    def __init__(self, message: str, order: Optional[int] = None,
                 partial: Optional[List[Any]] = None) -> None:
        super().__init__(message)
        self.order = order
        self.partial = partial or []


class SmoothnessExceeded(OrderExhausted):
    """A jet of higher order than the model's smoothness class was requested."""

    def __init__(self, message: str, requested: int, available: int) -> None:
        super().__init__(message)
        self.requested = requested
        self.available = available


# adiabatic iteration


class HadamardViolation(AdiavacError):
    """(Omega^[n])^2 is not positive at the base point."""

    exit_code = 2

    def __init__(self, order: int, value: float,
                 partial: Optional[List[Any]] = None) -> None:
        super().__init__(
            f"(Omega^[{order}])^2 = {value!r} <= 0: adiabatic order {order} does not exist"
        )
        self.order = order
        self.value = value
        self.partial = partial or []


# mode integration


class StepFailure(AdiavacError):
    """The adaptive integrator could not make progress."""


class PositivityLoss(AdiavacError):
    """The scale factor became non-positive on the integration span."""


class WronskianBroken(AdiavacError):
    """Mode data violate the normalisation conj(q) p - q conj(p) = -i."""

    exit_code = 5

    def __init__(self, message: str, deviation: float) -> None:
        super().__init__(message)
        self.deviation = deviation


class ModeMismatch(AdiavacError):
    """Bogoliubov coefficients were requested between different modes."""


# sensitivity and recovery


class NotAffine(AdiavacError):
    """(Omega^[1])^2 showed curvature in the second derivative of a."""

    exit_code = 5


class DegenerateSlope(AdiavacError):
    """The coefficient of the second derivative of a vanished."""

    exit_code = 5


# front end


class ConfigError(AdiavacError):
    """Unparseable configuration or missing input file."""

    exit_code = 4
