"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`KmpathError`.
The CLI maps :class:`ConfigError` to exit code 2 and everything else to 3.
"""


class KmpathError(Exception):
    """Base class."""


class ConfigError(KmpathError, ValueError):
    """Malformed or inconsistent configuration."""


class DomainError(KmpathError, ValueError):
    """Non-finite or otherwise invalid numeric input."""


class EmptyInputError(KmpathError, ValueError):
    pass


class ModelDomainError(KmpathError, ValueError):
    """Squared diffusion is negative where it must not be."""


class DivergenceError(KmpathError, RuntimeError):
    def __init__(self, path, step, value):
        self.path = path
        self.step = step
        self.value = value
        super().__init__(f"path {path} diverged at step {step} (|X| = {abs(value):.3g})")


class InsufficientDataError(KmpathError, ValueError):
    """No bin reaches the minimum count."""


class UnderdeterminedError(KmpathError, ValueError):
    pass


class ContractViolation(KmpathError, ValueError):
    """A documented precondition was not met by the caller."""


class SolverFailure(KmpathError, RuntimeError):
    """The PDE solver produced a field violating positivity or mass bounds."""


class UnreachableEndpointError(KmpathError, RuntimeError):
    """The pinned endpoint has vanishing transition probability."""
