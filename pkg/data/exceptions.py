"""
Exception hierarchy for the p-local lattice toolkit.

Every library error is a LatticeError so that the command layer can map any of
them to the input-error exit code with a single except clause.
"""


class LatticeError(ValueError):
    """Base class for all toolkit errors"""


class InvalidPrimeError(LatticeError):
    """Prime context is not an odd prime"""


class PrimeMismatchError(LatticeError):
    """Two operands carry different prime contexts"""


class NotAUnitError(LatticeError):
    """Argument has nonzero valuation where a unit is required"""


class ZeroArgumentError(LatticeError):
    """Argument is zero where a nonzero element is required"""


class NotLocalError(LatticeError):
    """Value has p in its denominator where an element of R is required"""


class SizeMismatchError(LatticeError):
    """Matrix dimensions are incompatible"""


class SingularFormError(LatticeError):
    """Gram matrix (or matrix to invert) is singular"""


class NotSymmetricError(LatticeError):
    """Gram matrix does not satisfy gram^T = epsilon * gram"""


class NotNearlyUnimodularError(LatticeError):
    """Form has a coradical exponent above 1 or is singular"""


class NotUnimodularError(LatticeError):
    """Form is required to have unit determinant"""


class NotIsometricError(LatticeError):
    """Forms are not isometric so no witness exists"""


class NotAnIsometryError(LatticeError):
    """Candidate matrix does not carry one Gram matrix to the other"""


class NotIdempotentError(LatticeError):
    """Matrix is not an idempotent of the order"""


class IncompatibleIdealError(LatticeError):
    """Bound matrix is not a two-sided lattice over the order"""


class UndefinedPowerError(LatticeError):
    """Negative radical power requested for a non-hereditary pattern"""


class UnsupportedDescriptorError(LatticeError):
    """Order or involution descriptor is not one of the supported cases"""


class PreconditionError(LatticeError):
    """Operation precondition does not hold"""


class RetryExhaustedError(LatticeError):
    """Randomized construction failed after the configured number of retries"""


class InvarianceError(LatticeError):
    """Gram matrix is not invariant under the group action"""


class DocumentError(LatticeError):
    """Input JSON document is malformed"""

    def __init__(self, message, issues=None):
        super().__init__(message)
        self.issues = list(issues or [])
