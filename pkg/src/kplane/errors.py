"""Exception types shared across the toolkit."""


class KplaneError(Exception):
    """Base class for all toolkit errors."""


class PoleError(KplaneError):
    """Evaluation requested exactly at a pole of a meromorphic quantity.

    ``residue`` carries the residue (or a numerical estimate of it) when the
    caller can make use of the limit structure instead.
    """

    def __init__(self, message, residue=None):
        super().__init__(message)
        self.residue = residue


class StripViolationError(KplaneError):
    """Order parameter lies outside the strip on which the continuation exists."""


class NegativeIntegerOrderError(StripViolationError):
    """Order hit a negative integer; the closed-form operation applies there."""


class MissingCoefficientError(KplaneError):
    """A Taylor coefficient required by a closed form is not available."""


class DivergenceError(KplaneError):
    """Declared decay is insufficient, or fails empirically, for convergence."""


class TaylorFailureError(KplaneError):
    """Numerical differentiation of a radial profile did not converge."""


class ClassViolationError(KplaneError):
    """Field lacks the regularity metadata the requested operation needs."""


class DegenerateSampleError(KplaneError):
    """Sampled values are degenerate (e.g. zeros where a log-fit needs magnitudes)."""


class ConfigError(KplaneError):
    """Malformed run configuration (parse or validation failure)."""
