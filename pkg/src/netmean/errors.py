"""Exception hierarchy shared across the package.

Validation problems map to CLI exit code 2, complexity guards to exit code 3.
"""

from __future__ import annotations


class NetmeanError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(NetmeanError, ValueError):
    """Malformed or inconsistent input (bad dimension, asymmetry, ...)."""


class ComplexityError(NetmeanError):
    """A guard against silently exponential work was triggered."""


class DegenerateAxisError(ValidationError):
    """An operation required a distinct axis vector but got one with a
    nontrivial stabilizer (the cone angle would be zero)."""


class DegenerateDomainError(ValidationError):
    """A fundamental domain was requested for a non-distinct vector
    (some half-space normals would vanish)."""


class CertificateError(NetmeanError):
    """A uniqueness certificate could not be established.

    ``offenders`` lists the indices of the samples that fall outside the
    certifying cone so callers can inspect or fall back.
    """

    def __init__(self, message: str, offenders: list[int] | None = None):
        super().__init__(message)
        self.offenders = list(offenders) if offenders is not None else []


class SamplingError(NetmeanError):
    """Rejection sampling failed to reach a usable acceptance rate."""
