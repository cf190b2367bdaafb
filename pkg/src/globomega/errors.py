"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class GlobomegaError(Exception):
    """Base class for every error raised by this package."""


class MalformedTable(GlobomegaError, ValueError):
    def __init__(self, dims, index: int, reason: str):
        self.dims = tuple(dims)
        self.index = index
        self.reason = reason
        super().__init__(f"malformed table {self.dims} at index {index}: {reason}")


class NotGlobular(GlobomegaError, ValueError):
    """A globular set or map violates the globular identities."""


class NotParallel(GlobomegaError, ValueError):
    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class DimensionMismatch(GlobomegaError, ValueError):
    pass


class BoundaryMismatch(GlobomegaError, ValueError):
    pass


class NotAnRMap(GlobomegaError, ValueError):
    pass


class NotRMap(NotAnRMap):
    """The right leg of a lifting square is not an R-map."""


class NotLMap(GlobomegaError, ValueError):
    pass


class SquareDoesNotCommute(GlobomegaError, ValueError):
    pass


class NotUnderA0(GlobomegaError, ValueError):
    """A morphism out of a globular product does not commute with the i maps."""


class BackendLawFailure(GlobomegaError, AssertionError):
    """An equation that holds in every identity type category failed."""


class TruncationExceeded(GlobomegaError, ValueError):
    pass


class OutOfRange(GlobomegaError, IndexError):
    pass


class UnknownOperation(GlobomegaError, KeyError):
    def __str__(self) -> str:  # KeyError would quote the message
        return str(self.args[0]) if self.args else ""


class MissingPrerequisite(GlobomegaError, ValueError):
    pass


class GroupoidFormatError(GlobomegaError, ValueError):
    """Raised when a groupoid JSON document fails to parse or validate."""
