"""Exception types shared across the package."""


class ContractShapeError(ValueError):
    """Paired tensor legs have different dimensions."""


class NumericalFailure(RuntimeError):
    """A dense factorization did not converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DomainError(ValueError):
    """Argument outside the domain of a formula."""


class ResourceError(MemoryError):
    """Requested dense object exceeds the configured size cap."""


class SingularConfigurationError(ValueError):
    """Bethe roots sit on a pole of the Bethe equations."""


class NullStateError(ValueError):
    """Creation operators annihilated the reference state."""


class PoleError(ValueError):
    """Spectral parameter coincides with a rapidity."""


class ContinuationError(RuntimeError):
    """Newton continuation of Bethe roots failed."""


class ClassificationError(ValueError):
    """Spin content of an eigenspace is not integral."""
