"""Exception hierarchy shared by every module."""


class BerryError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(BerryError, ValueError):
    pass


class OutOfDomainError(BerryError, ValueError):
    """Evaluation requested outside the region where a representation is valid."""


class ResolutionError(BerryError, ValueError):
    """Grid spacing too coarse for the requested energy."""


class UnsupportedCaseError(BerryError, NotImplementedError):
    pass


class ConfigError(BerryError, ValueError):
    pass


class ParseError(BerryError, ValueError):
    """Malformed persisted file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
