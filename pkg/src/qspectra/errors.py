"""Exception and warning types raised by qspectra."""

from __future__ import annotations

__all__ = [
    "QSpectraError",
    "DomainError",
    "PoleError",
    "ParameterError",
    "ConvergenceError",
    "TailError",
    "QuantizationPole",
    "NoRootError",
    "NodeMismatchError",
    "ScanWarning",
]


class QSpectraError(Exception):
    """Base class for all qspectra errors."""


class DomainError(QSpectraError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class PoleError(QSpectraError, ArithmeticError):
    """Evaluation hit a pole (zero denominator or Gamma-function pole)."""


class ParameterError(QSpectraError, ValueError):
    """A special-function parameter combination is not allowed."""


class ConvergenceError(QSpectraError, RuntimeError):
    """An iterative evaluation did not reach its tolerance within budget."""


class TailError(QSpectraError, RuntimeError):
    """The decay of a wave function is too slow for a bounded integration range."""


class QuantizationPole(QSpectraError):
    """The trial energy sits on a bound state, where G(x0, x0) vanishes."""


class NoRootError(QSpectraError, RuntimeError):
    """No eigenvalue crossing was found in the scanned energy window."""


class NodeMismatchError(QSpectraError, RuntimeError):
    """Roots were found but none has the requested number of nodes."""


class ScanWarning(UserWarning):
    """A grid scan may have missed or merged roots."""
