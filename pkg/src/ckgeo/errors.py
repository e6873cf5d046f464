"""Exception types shared across the package."""


class CKGeoError(Exception):
    """Base class for all package errors."""


class IndexRangeError(CKGeoError, IndexError):
    """Generator or involution label outside 0 <= a < b <= n."""


class ChartDomainError(CKGeoError, ValueError):
    """Coordinates outside the chart on which a map or metric is defined."""


class DegenerateMetricError(CKGeoError, ValueError):
    """Operation requires an invertible metric but got a degenerate one."""


class FlatCaseError(CKGeoError, ValueError):
    """Ambient pullback is undefined at zero curvature (kappa1 = 0)."""


class ConformalSingularityError(ChartDomainError):
    """Conformal factor of the deformed polar metric vanishes (Ck_z(r) = 0)."""


class FixedPointDivergence(CKGeoError, RuntimeError):
    """Implicit-midpoint fixed-point iteration failed to converge."""


class TrajectoryLeftDomain(CKGeoError, RuntimeError):
    """Geodesic flow exited the metric's domain; carries the states so far."""

    def __init__(self, message: str, states):
        super().__init__(message)
        self.states = states
