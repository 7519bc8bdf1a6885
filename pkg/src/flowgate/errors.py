"""Exception hierarchy shared across the package."""


class FlowgateError(Exception):
    """Base class for all errors raised by this package."""


class DataError(FlowgateError):
    """Raised when input data violates a contract (shape, range, vocabulary)."""


class ConfigError(FlowgateError):
    """Raised when a configuration document or CLI invocation is malformed."""
