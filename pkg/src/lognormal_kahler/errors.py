"""Exception hierarchy shared by every module."""

from __future__ import annotations


class LognormalKahlerError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LognormalKahlerError, ValueError):
    """Input lies outside the half-space theta2 < 0 (or is otherwise invalid)."""


class QuadratureError(LognormalKahlerError, ArithmeticError):
    """Gauss-Hermite quadrature cannot be set up (degenerate variance, bad order)."""


class StencilDomainError(DomainError):
    """A finite-difference stencil would leave the manifold even after shrinking."""


class DomainExitError(DomainError):
    """An integrated trajectory left the manifold.

    ``parameter`` holds the flow parameter of the last valid sample.
    """

    def __init__(self, message: str, parameter: float):
        super().__init__(message)
        self.parameter = parameter


class PoleError(LognormalKahlerError, ZeroDivisionError):
    """A denominator of the xi coefficient vanished."""


class WavefunctionOverflowError(LognormalKahlerError, OverflowError):
    """The real part of the wavefunction exponent is too large to exponentiate."""


class GridError(LognormalKahlerError, ValueError):
    """A log-grid is too small or not uniform."""
