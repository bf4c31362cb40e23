"""Exception hierarchy shared by every module."""


class NoisyTeleError(Exception):
    """Base class for all package errors."""


class ValidationError(NoisyTeleError, ValueError):
    """An input object violates one of its invariants."""


class ParameterError(NoisyTeleError, ValueError):
    """A family or model parameter lies outside its admissible range."""


class ScopeError(NoisyTeleError, ValueError):
    """A condition was requested outside the determinant branch it is defined for."""


class InfeasibleError(NoisyTeleError):
    """No channel on the admissible domain satisfies the requested conditions."""
