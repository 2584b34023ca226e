"""Exception types shared across modules (mapped to CLI exit codes)."""


class ParameterError(ValueError):
    """A parameter violates a documented precondition (exit code 3)."""


class WindowClipped(ParameterError):
    """A window's support reaches past the grid."""


class MalformedInput(ValueError):
    """Input data could not be parsed (exit code 2)."""
