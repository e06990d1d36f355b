"""Exception hierarchy shared by all modules.

Each class maps onto one CLI exit code (see :mod:`hybridwigner.cli`).
"""


class HybridWignerError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(HybridWignerError, ValueError):
    """Bad user-supplied parameter (exit code 2)."""


class InvalidDimensionError(InvalidInputError):
    pass


class InvalidParameterError(InvalidInputError):
    pass


class CompositionError(InvalidInputError):
    """Operands with incompatible field/atom factor layout."""


class NothingToTraceError(InvalidInputError):
    pass


class RenderSpecError(InvalidInputError):
    pass


class DumpFormatError(InvalidInputError):
    """Malformed field or state dump; ``offset`` is the failing byte offset."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class MissingSliceError(HybridWignerError):
    """Render requested a disc centre that was never evaluated."""


class NumericError(HybridWignerError, ArithmeticError):
    """Non-finite input or failed numerical invariant (exit code 3)."""


class TruncationError(NumericError):
    """Fock truncation too small for the requested state or displacement."""

    def __init__(self, message, required_dim=None):
        super().__init__(message)
        self.required_dim = required_dim


class RevivalEstimationError(NumericError):
    pass


class TruncationWarning(UserWarning):
    pass
