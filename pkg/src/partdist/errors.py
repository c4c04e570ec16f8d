"""Exception types shared across the package."""


class PartDistError(ValueError):
    """Base class for all input-validation errors raised by this package."""


class InvalidArgumentError(PartDistError):
    """Raised for malformed arguments (bad dimensions, ranges, signs)."""


class InvalidPartitionError(PartDistError):
    """Raised when a label assignment does not describe a valid partition."""


class UnbalancedInputError(PartDistError):
    """Raised when a balanced-only operation receives unequal total masses."""


class DisconnectedGraphError(PartDistError):
    """Raised when a graph (or required subgraph) is not connected."""
