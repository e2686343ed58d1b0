"""
Exception hierarchy shared by every ctflow module.

Each exception carries the process exit code the CLI reports for it:
2 for configuration and precondition errors, 3 for numerical failures.
"""

from typing import Any


class CtflowError(Exception):
    exit_code: int = 3


class ConfigError(CtflowError, ValueError):
    """Invalid run configuration, model parameters or operation preconditions."""

    exit_code = 2


class NumericalError(CtflowError, ArithmeticError):
    """A computation could not be completed with the requested accuracy."""

    exit_code = 3


# Models
class UnknownModel(ConfigError):
    pass


class NoClosedForm(ConfigError):
    pass


class NoSimGraph(ConfigError):
    pass


class DomainError(ConfigError):
    pass


class BranchAmbiguity(ConfigError):
    pass


class SingularState(NumericalError):
    pass


class SolutionPole(NumericalError):
    pass


class NoFixedPointFound(NumericalError):
    pass


# Flow
class AnchorOutsideGrid(ConfigError):
    pass


class ToleranceNotMet(NumericalError):
    pass


class SingularityEncountered(NumericalError):
    """
    Integration stopped before reaching the end of the path.

    Attributes:
        furthest: last complex time at which the state was still valid.
        state: the state at `furthest`.
        reason: "locus", "step_underflow", "blowup" or "non_finite".
    """

    def __init__(self, message: str, furthest: complex, state: Any = None, reason: str = "locus"):
        super().__init__(message)
        self.furthest = furthest
        self.state = state
        self.reason = reason


# Spectral
class NonUniformSampling(ConfigError):
    pass


class LengthNotPowerOfTwo(ConfigError):
    pass


class ZeroSignal(NumericalError):
    pass


# Detect
class NoSpectralGap(ConfigError):
    pass
