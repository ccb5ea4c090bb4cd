"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations

__all__ = [
    "QCalcError",
    "DomainError",
    "ConvergenceDomainError",
    "NotConverged",
    "DivisionByZero",
    "RhsDomainError",
]


class QCalcError(Exception):
    """Base class for all errors raised by :mod:`qprabhakar`."""


class DomainError(QCalcError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ConvergenceDomainError(DomainError):
    """A series argument lies outside its disc of convergence."""


class NotConverged(QCalcError, ArithmeticError):
    """A truncated series or product did not meet its tolerance.

    The partially summed value, when available, is attached as ``partial``
    (a :class:`~qprabhakar.qcore.SeriesValue` with ``converged=False``).
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class DivisionByZero(QCalcError, ZeroDivisionError):
    """A denominator q-product vanishes (singular fractional q-power)."""


class RhsDomainError(DomainError):
    """The right-hand side of a Cauchy problem is undefined at a required point."""
