"""Exception hierarchy shared by every module."""


class VisaError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(VisaError, ValueError):
    """Invalid configuration, unknown tag, or mismatched dimensions."""


class CheckpointError(ConfigError):
    """Malformed checkpoint file or checkpoint/environment mismatch."""


class InputError(VisaError, ValueError):
    """Runtime input outside an operation's precondition."""


class NumericError(VisaError, ArithmeticError):
    """Non-finite value produced inside a computation graph."""

    def __init__(self, node: str, message: str | None = None) -> None:
        """
        Initialize numeric error.

        Args:
            node: Name of the graph node that produced the non-finite value.
            message: Optional detail.
        """
        self.node = node
        super().__init__(message or f"non-finite value at node '{node}'")
