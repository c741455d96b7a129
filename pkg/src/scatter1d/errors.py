"""Exception hierarchy.  The CLI maps these onto exit codes."""


class Scatter1DError(Exception):
    """Base class for all library errors."""


class ConfigurationError(Scatter1DError):
    """Unknown potential family, malformed spec file, bad CLI options."""


class ValidationError(Scatter1DError, ValueError):
    """Inputs violate a documented precondition."""


class UsageError(Scatter1DError):
    """Incompatible arguments (mismatched grids, same-side Wronskian, ...)."""


class DomainError(Scatter1DError, ValueError):
    """Spectral parameter outside the admissible region."""


class SolverError(Scatter1DError):
    """An iterative or linear solve did not produce a trustworthy result."""


class ExceptionalFrequencyError(SolverError):
    """The frequency is (numerically) exceptional: alpha ~ 0 or I + T singular."""

    def __init__(self, message, *, frequency=None, condition=None, nearest_zero=None):
        super().__init__(message)
        self.frequency = frequency
        self.condition = condition
        self.nearest_zero = nearest_zero


class SpectralProximityError(SolverError):
    """The spectral parameter is too close to the spectrum of H."""


class PartialBasisError(SolverError):
    """Some columns of a generalized eigenbasis could not be built."""

    def __init__(self, message, failed):
        super().__init__(message)
        self.failed = list(failed)


class OracleError(Scatter1DError):
    """The finite-difference reference failed; comparisons are aborted."""
