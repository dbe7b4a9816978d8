"""Exception types shared across the package."""


class ThreeBodyError(Exception):
    """Base class for all errors raised by parabolic3b."""


class InvalidMassError(ThreeBodyError, ValueError):
    pass


class CollisionError(ThreeBodyError):
    """A mutual distance fell below the collision cutoff."""


class ZeroConfigurationError(ThreeBodyError, ValueError):
    pass


class NotCenteredError(ThreeBodyError, ValueError):
    pass


class ConvergenceError(ThreeBodyError):
    pass


class NonPositiveTimeError(ThreeBodyError, ValueError):
    pass


class BoundaryError(ThreeBodyError):
    """A mass triple sits numerically on the spiraling boundary nu = 1/8."""


class StepFailure(ThreeBodyError):
    """The adaptive integrator could not take a step (step size underflow)."""


class ConstraintBlowup(ThreeBodyError):
    pass


class DegenerateSpectrumError(ThreeBodyError):
    pass


class SingularChartError(ThreeBodyError, ValueError):
    """Symplectic forms are singular on the collision/infinity manifold."""


class QuadratureError(ThreeBodyError):
    pass


class NotSpiralingError(ThreeBodyError):
    pass


class WindowError(ThreeBodyError, ValueError):
    """A time window is not covered by trajectory samples."""
