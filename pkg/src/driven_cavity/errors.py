"""Exception types raised across the package."""


class CavityError(Exception):
    """Base class for all errors raised by driven_cavity."""


class TruncationError(CavityError):
    """The Fock-space cutoff is too small for the requested state or evolution."""


class StepSizeError(CavityError):
    """The fixed integration step is too coarse for the generator."""


class WeakDrivingError(CavityError):
    """Drive amplitude at or below g/2, so the bistable steady states do not exist."""


class ZeroAmplitudeError(CavityError):
    """No excited-state amplitude to emit from."""


class InvalidDensityMatrix(CavityError):
    """Matrix is not Hermitian, unit-trace and positive semidefinite."""


class NormalizationError(CavityError):
    """A normalizing denominator vanished."""


class DimensionError(CavityError, ValueError):
    """Operands have incompatible shapes."""


class ConfigError(CavityError, ValueError):
    """Invalid experiment configuration."""


class ApproximationWarning(UserWarning):
    """An analytic approximation is being used outside its comfortable range."""
