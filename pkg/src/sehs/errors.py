"""Exception taxonomy shared by all subpackages.

CLI exit-code mapping: ConfigError -> 2, NumericalError/ConvergenceError -> 3,
partial results -> 4 (handled in the pipeline, not via an exception type).
"""


class SehsError(Exception):
    """Base class for all package errors."""


class DomainError(SehsError, ValueError):
    """Input violates a documented precondition or invariant."""


class ConfigError(SehsError, ValueError):
    """Run configuration is malformed or inconsistent."""


class NumericalError(SehsError, RuntimeError):
    """A numerical procedure failed (eigensolve, factorisation, search)."""


class ConvergenceError(NumericalError):
    """An iterative scheme exceeded its iteration cap or underflowed."""
