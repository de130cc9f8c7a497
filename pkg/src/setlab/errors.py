"""Exception types shared across setlab."""


class SetlabError(Exception):
    """Base class for setlab errors."""


class ArgumentError(SetlabError, ValueError):
    """An argument violates an operation's precondition."""


class CapabilityError(SetlabError, RuntimeError):
    """The request is well-formed but outside what the operation can do.

    Raised for configured limits (vertex caps, canonicalization limits) and
    for unmet theorem hypotheses that an operation refuses to work around.
    """


class FormatError(ArgumentError):
    """Malformed family text or checkpoint file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
