"""Exception and warning types shared across the package."""


class GwenumError(Exception):
    """Base class for all library errors."""


class ZeroElement(GwenumError):
    """A nonzero field element was required."""


class EvenCharacteristic(GwenumError):
    """Finite base fields must have odd characteristic."""


class FieldMismatch(GwenumError):
    """Operands live over different base fields."""


class UnsupportedExtension(GwenumError):
    """The requested norm/trace extension is outside the supported algebra kinds."""


class IndexOutOfRange(GwenumError):
    """Binomial index j exceeds the algebra degree."""


class DegreeMismatch(GwenumError):
    """An algebra degree does not match the required 2j bookkeeping."""


class DegreeLimitExceeded(GwenumError):
    """Brute-force subset enumeration is capped at algebra degree 12."""


class DimensionMismatch(GwenumError):
    """Divisor class length does not match the lattice rank."""


class NotPerpendicular(GwenumError):
    """The divisor class is not orthogonal to the vanishing cycle."""


class MissingEntry(GwenumError):
    """An invariant-table lookup failed under the strict missing policy."""


class ProfileInconsistent(GwenumError):
    """Profile records violate the fiber-pair degree bookkeeping."""


class ParityViolation(GwenumError):
    """Count data with inconsistent parities cannot split into the displayed form."""


class SquareTwistWarning(UserWarning):
    """Twisting by a square class: the C2-action is trivial and the plain value is returned."""


class MissingEntryWarning(UserWarning):
    """An absent invariant-table entry was treated as zero."""
