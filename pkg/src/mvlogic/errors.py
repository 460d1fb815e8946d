"""Exception types shared across the engine."""


class MvlogicError(Exception):
    """Base class for every error raised by this package."""


class KbSyntaxError(MvlogicError):
    """Malformed source text; carries a 1-based line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class StratificationError(MvlogicError):
    """A predicate depends on its own negation; ``cycle`` lists the loop."""

    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("not stratified, negative cycle through: " + " -> ".join(self.cycle))


class GroundingError(MvlogicError):
    """Grounding would not terminate (nested compound terms)."""


class BoundExceededError(MvlogicError):
    """A desk-scale enumeration bound was exceeded."""


class PreconditionError(MvlogicError):
    """An operation was invoked outside its stated precondition."""


class TransportError(MvlogicError):
    """The conversation transport failed or ran out of scripted replies."""


class BridgeError(MvlogicError):
    """A tool call could not be dispatched (unknown tool, bad arguments)."""
