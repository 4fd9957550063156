"""Exception hierarchy shared by every module in the package."""


class QuditError(ValueError):
    """Base class for all library errors."""


class LengthMismatch(QuditError):
    pass


class NotNormalized(QuditError):
    pass


class DuplicateLabel(QuditError):
    pass


class DimensionMismatch(QuditError):
    pass


class LabelCollision(QuditError):
    pass


class RegistryMismatch(QuditError):
    pass


class UnknownLabel(QuditError, KeyError):
    # KeyError.__str__ quotes the message; keep ValueError's formatting.
    __str__ = ValueError.__str__


class NotUnitary(QuditError):
    pass


class IndexOutOfRange(QuditError):
    pass


class SameParticle(QuditError):
    pass


class ShapeMismatch(QuditError):
    pass


class OutOfOrder(QuditError):
    pass


class CapExceeded(QuditError):
    """Raised when a register or composite state would exceed the amplitude cap."""


class BranchCapExceeded(CapExceeded):
    """Raised when exhaustive enumeration would produce too many branches."""


class UnsupportedModel(QuditError):
    pass
