"""Exception hierarchy shared by every layer of the lab."""

from __future__ import annotations


class LabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(LabError, ValueError):
    """Invalid grid, equation or experiment configuration."""


class UsageError(LabError, ValueError):
    """An operation was called with arguments outside its contract."""


class NumericError(LabError, ArithmeticError):
    """A computation produced NaN, an infinity or an ill-defined value."""


class SingularityError(NumericError):
    """A singular Fourier symbol met a nonzero mode."""


class OutputError(LabError, OSError):
    """Writing or reading an output file failed; the message names the path."""


class BlowUpError(NumericError):
    """The nonlinear evolution left the range of finite floats.

    Attributes
    ----------
    time:
        Simulation time at which the failure was detected.
    sup:
        Last finite sup-norm of the state (``inf`` if none was finite).
    """

    def __init__(self, time: float, sup: float, message: str | None = None) -> None:
        self.time = float(time)
        self.sup = float(sup)
        super().__init__(message or f"blow-up detected at t={self.time:.6g} (sup|u|={self.sup:.6g})")


__all__ = [
    "LabError",
    "ConfigurationError",
    "UsageError",
    "NumericError",
    "SingularityError",
    "BlowUpError",
    "OutputError",
]
