"""Exception hierarchy shared across the package.

The CLI maps these classes onto exit codes, so library code should raise
the most specific class that applies rather than a bare ValueError.
"""


class CurveTailError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(CurveTailError):
    """Malformed inputs: length mismatches, curves shorter than three points."""


class DomainError(CurveTailError):
    """A numeric argument lies outside its mathematical domain."""


class ParameterError(CurveTailError):
    """A tuning parameter (k, h, window size) is outside its admissible range."""


class ConfigError(CurveTailError):
    """Inconsistent, incomplete or unknown configuration."""


class EmptyWindowError(CurveTailError):
    """No design point falls inside the requested ball."""


class DegenerateGridError(CurveTailError):
    """The pairwise-distance grid collapses because all curves coincide."""


class OrderBeyondSampleError(DomainError):
    """floor(m * alpha) = 0: the requested order lies beyond the sample maximum.

    Callers should switch to the extrapolated estimator in this regime.
    """


class NotExtrapolationError(ParameterError):
    """alpha exceeds the anchor order k/m, so no extrapolation is needed."""


class SelectionError(CurveTailError):
    """No feasible (h, k) pair remains on the selection grid."""


class GenerationError(CurveTailError):
    """Synthetic data generation violated one of its postconditions."""


class StudyError(CurveTailError):
    """A simulation study violated one of its invariants."""
