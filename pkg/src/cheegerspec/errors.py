"""Exception types raised by the solvers."""


class CheegerSpecError(Exception):
    """Base class for all package errors."""


class HorizonError(CheegerSpecError):
    """The horizon bracket grew past its ceiling before enclosing the root."""


class IntegrationError(CheegerSpecError):
    """Adaptive stepping underflowed the minimum step size."""


class BracketError(CheegerSpecError):
    """The upward eigenvalue scan passed its ceiling without bracketing."""


class SingularSubstitutionError(CheegerSpecError):
    """The z-substitution is undefined because the curvature bound equals 1."""
