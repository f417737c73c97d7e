"""Exception types shared across the package."""


class SturmlabError(Exception):
    """Base class for all library errors."""


class DomainError(SturmlabError, ValueError):
    """An operation was applied outside its mathematical domain."""


class WindowError(SturmlabError, IndexError):
    """An index lies outside the range where an object is defined."""


class InsufficientDepth(SturmlabError):
    """The requested accuracy needs more terms than the allowed budget."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class PrecisionExhausted(SturmlabError):
    """Two candidate values could not be separated at the maximal precision."""

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class SchemaError(SturmlabError, ValueError):
    """A JSON document does not have the expected shape."""
