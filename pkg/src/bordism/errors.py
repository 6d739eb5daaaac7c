"""Exception hierarchy shared by every module."""


class BordismError(Exception):
    """Base class for all errors raised by the package."""


class PreconditionError(BordismError, ValueError):
    """An argument violates a documented precondition."""


class TruncationError(BordismError):
    """A value was requested beyond the truncation of the ring context."""


class PrecisionError(BordismError):
    """A computation would exhaust the tracked series precision.

    ``needed`` is the truncation degree that would have been required,
    when it is known.
    """

    def __init__(self, message, needed=None):
        super().__init__(message)
        self.needed = needed


class ResourceError(BordismError):
    """A requested size exceeds the configured resource limits."""


class ParseError(BordismError, ValueError):
    """Malformed textual input. ``pos`` is a character offset if known."""

    def __init__(self, message, pos=None):
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)
        self.pos = pos
