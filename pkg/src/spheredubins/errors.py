"""Exception types shared across the package."""


class ChartPoleError(ValueError):
    """A latitude/longitude chart operation got too close to a pole.

    The chart is singular at the poles; every operation that reads or
    produces chart coordinates refuses latitudes within the guard band
    of +/- pi/2.  ``breach_s`` carries the arc length at which an
    integration run left the valid region, when that is known.
    """

    def __init__(self, message, breach_s=None):
        super().__init__(message)
        self.breach_s = breach_s


class AbnormalSingularError(RuntimeError):
    """Singular switching data with a zero cost multiplier.

    A vanishing switching function together with a vanishing cost
    multiplier admits no well-defined control choice, so callers must
    treat the combination as "no optimal control action exists".
    """


class DomainRadiusError(ValueError):
    """Turn radius outside the range the candidate family is proven for."""


class NoSolutionError(RuntimeError):
    """The planner (or the grid oracle) found no acceptable candidate."""
