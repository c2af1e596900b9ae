"""Exception types shared across the package.

Validation problems (bad shapes, bad config keys, sign constraints) raise
ConfigError; runtime numerical failures (NaN/Inf states, singular couplings)
raise NumericalError.  The CLI maps these to exit codes 1 and 2.
"""


class ConfigError(ValueError):
    """Invalid input, configuration, or constraint violation."""


class ShapeError(ConfigError):
    """Field shape does not match the owning grid."""


class NumericalError(RuntimeError):
    """Nonfinite values or singular systems encountered during computation."""


class CflError(ConfigError):
    """Requested time step exceeds the stability bound."""

    def __init__(self, dt: float, bound: float):
        self.dt = dt
        self.bound = bound
        super().__init__(f"dt={dt:g} exceeds the CFL bound {bound:g}")
