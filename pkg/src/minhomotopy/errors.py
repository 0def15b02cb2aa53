"""Exception types shared across the pipeline."""


class InvalidCurveError(ValueError):
    """A closed-curve input violates a structural requirement."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class IndeterminateWindingError(ValueError):
    """Winding-number query cannot be resolved (point on or too near the curve)."""


class DegenerateCurveError(ValueError):
    """Curve geometry is too degenerate to select normalization pins."""


class ConfigurationError(ValueError):
    """A mesh or run configuration value is out of contract."""


class MeshQualityError(ValueError):
    """A mesh fails a quality requirement, e.g. a degenerate triangle."""


class SolverError(RuntimeError):
    """Base class for minimization failures."""


class DescentFailureError(SolverError):
    """No admissible energy-decreasing step exists above the step floor."""


class SweepAbortError(SolverError):
    """A continuation sweep died at one of its lift radii."""

    def __init__(self, message: str, epsilon: float | None = None):
        super().__init__(message)
        self.epsilon = epsilon


class NonConvergenceError(SolverError):
    """A continuation sweep did not reach Cauchy behavior at desk scale.

    Carries the monitor series so the failure can be diagnosed from the
    exception alone.
    """

    def __init__(self, message: str, monitors: dict | None = None):
        super().__init__(message)
        self.monitors = dict(monitors or {})


class DiscontinuousParametrizationError(RuntimeError):
    """The limit boundary parametrization jumps too much across one arc."""

    def __init__(self, message: str, arc: tuple | None = None):
        super().__init__(message)
        self.arc = arc


class OutputError(OSError):
    """A report or archive destination cannot be written."""
