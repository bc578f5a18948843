"""Exception types raised by the eracah package."""

from __future__ import annotations


class EracahError(Exception):
    """Base class for every error raised by this package."""


class DomainViolation(EracahError):
    """One or more coupling-parameter constraints failed."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("parameter domain violated: " + "; ".join(self.violations))


class VirtualParamSingular(EracahError):
    """The virtual parameter (or its shift by one) sits on the period lattice."""


class NonConvergence(EracahError):
    """An iterative evaluation failed to converge (invalid context or sweep)."""


class PoleProximity(EracahError):
    """A coefficient denominator came too close to a pole."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class InvariantViolation(EracahError):
    """A structural invariant failed during construction."""


class PositivityViolation(EracahError):
    """Off-diagonal coefficients required to be positive are not."""


class DegenerateSpectrum(EracahError):
    """Eigenvalue separation below threshold; parameters outside the guaranteed domain."""


class OffShell(EracahError):
    """An energy value is not (numerically) a root of the characteristic polynomial."""


class ExpansionTooLarge(EracahError):
    """Explicit determinant expansion requested beyond the practical degree cap."""


class FormMismatch(EracahError):
    """Two independent closed forms of the same quantity disagree."""


class SignPatternViolation(EracahError):
    """The (-1)^j sign ladder of the reflection constants is broken."""


class ProductIdentityViolation(EracahError):
    """A product identity between reflection constants failed."""


class DenominatorPoleBeforeTermination(EracahError):
    """A basic hypergeometric denominator Pochhammer vanished before the series terminated."""


class ImaginaryLeak(EracahError):
    """A quantity that must be real on shell came out with a large imaginary part."""
