"""Exception hierarchy shared across the package."""


class WavekinError(Exception):
    """Base class for all package errors."""


class ConfigurationError(WavekinError):
    """Invalid grid, scenario or run configuration."""


class SolverError(WavekinError):
    """Failure inside the implicit time integrator."""


class NonConvergence(SolverError):
    """Newton iteration failed to reach the residual tolerance.

    Signals step rejection to the adaptive controller; it is only fatal
    when the step size can no longer be reduced.
    """


class AbortedAtMinStep(SolverError):
    """The controller hit the minimum step size with repeated rejections."""


class InsufficientSamples(WavekinError):
    """Not enough series samples inside the requested fit window."""


class NonPositiveValue(WavekinError):
    """Log-log fitting requires strictly positive times and values."""
