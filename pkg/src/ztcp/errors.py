"""Exception types shared across the package."""


class ZtcpError(Exception):
    """Base class for library-specific errors."""


class ParseError(ZtcpError):
    """Malformed tensor or vector text; carries the offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NotApplicableError(ZtcpError):
    """A structural precondition of the requested method does not hold."""


class GenerationError(ZtcpError):
    """Random instance generation exhausted its redraw budget."""
