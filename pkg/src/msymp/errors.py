"""Exception types shared across the package."""


class DomainError(ValueError):
    """A state lies outside the admissible region (e.g. non-positive density)."""


class UsageError(ValueError):
    """Arguments are inconsistent (shape mismatch, bad index pair, ...)."""


class SolverAbort(RuntimeError):
    """A time integration produced NaN or a non-positive density.

    ``snapshot`` holds the last finite state (if any) for diagnostics.
    """

    def __init__(self, message, t=None, snapshot=None):
        super().__init__(message)
        self.t = t
        self.snapshot = snapshot


class ConfigError(ValueError):
    """Invalid run configuration."""
