"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when caller-supplied data violates a precondition."""


class NumericalError(RuntimeError):
    """Raised when a numerical routine fails beyond recoverable tolerance."""
