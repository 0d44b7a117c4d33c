"""Exception types raised across the package."""


class QuboError(ValueError):
    """Base class for rejected inputs."""


class DimensionError(QuboError):
    """Array shapes or bit-string lengths do not agree."""


class CapacityError(QuboError):
    """A problem exceeds a configured size cap."""

    def __init__(self, message: str, cap: int):
        super().__init__(message)
        self.cap = cap


class ParseError(QuboError):
    """A problem or data file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(QuboError):
    """A solver configuration is invalid for the given problem."""


class PlanError(QuboError):
    """An experiment plan failed validation."""
