"""Exception hierarchy shared across the package."""


class CasimirError(Exception):
    """Base class for all errors raised by gyrocasimir."""


class DomainError(CasimirError, ValueError):
    """An argument lies outside the domain of the model or formula."""


class SingularMediumError(CasimirError):
    """The permittivity tensor (or its inverse) is singular."""


class GrazingModeError(CasimirError):
    """A transmitted mode has no decay along z even after a k_x perturbation."""


class DegenerateModeError(CasimirError):
    """Eigenmodes coincide and the two-mode matching system is rank deficient."""


class MatchingError(CasimirError):
    """The interface matching denominators vanish."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ModeInstabilityError(CasimirError):
    """The loop determinant L is not positive, signalling unphysical inputs."""


class ConvergenceError(CasimirError):
    """Summation or quadrature did not reach the requested tolerance.

    The best available estimate is attached as ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConfigError(CasimirError):
    """Invalid run configuration."""
