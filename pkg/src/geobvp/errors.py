"""Exception types shared across the toolkit."""


class GeoBVPError(Exception):
    """Base class for all toolkit errors."""


class DomainError(GeoBVPError):
    """Invalid geometric data (non-positive warp, bad interval, ...)."""


class PoleRegularityError(GeoBVPError):
    """Cap closure at r = 0 violates phi(0) = 0, phi'(0) = 1."""


class ConsistencyError(GeoBVPError):
    """Two independent evaluation paths disagree beyond tolerance.

    Signals a formula or discretization bug, not a user error.
    """


class SolvabilityError(GeoBVPError):
    """A linear boundary problem is degenerate (eigenvalue at zero)."""


class PreconditionError(GeoBVPError):
    """A spectral or curvature hypothesis required by an operation fails."""


class BracketError(GeoBVPError):
    """Monotone iteration left the sub/supersolution bracket."""

    def __init__(self, message, t_admissible=None):
        super().__init__(message)
        self.t_admissible = t_admissible


class StagnationError(GeoBVPError):
    """Iterative solver stopped making progress."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class EtaTooLargeError(GeoBVPError):
    """Local prescription target is outside the Newton trust region."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class RangeConditionError(GeoBVPError):
    """Target function violates the required range/straddle condition."""


class InfeasibleFactorError(GeoBVPError):
    """Sphere-factor construction failed for the requested tolerances."""

    def __init__(self, message, best_gaps=None):
        super().__init__(message)
        self.best_gaps = best_gaps
