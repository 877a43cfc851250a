"""Exception hierarchy shared by the whole package.

Library code raises these instead of letting bare arithmetic errors escape;
the CLI maps them onto its documented exit codes.
"""


class PolypowError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(PolypowError):
    """An operation was called outside its documented domain."""


class FieldDivisionError(PreconditionError):
    """Division by zero in the prime field or by a zero polynomial."""


class ParseError(PolypowError):
    """Malformed input text (instance files, polynomial lines, flags)."""


class ParameterCollision(PolypowError):
    """The reduction parameter collided with an exponent mod p."""


class TelescoperNotFound(PolypowError):
    """No linear relation among the reduction residuals was found."""


class ReconstructionError(PolypowError):
    """Rational reconstruction failed within the given degree bounds."""


class SingularUnroll(PolypowError):
    """Unrolling hit a vanishing leading coefficient with no known value."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"missing known value at singular index {index}")


class VerificationError(PolypowError):
    """A cross-check between two independent computations disagreed."""
