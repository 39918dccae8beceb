"""Exception hierarchy shared by every module."""


class SolitonLabError(Exception):
    """Base class for all package errors."""


class DomainError(SolitonLabError, ValueError):
    """Curvature outside the domain of an integrand or speed law."""


class NoSolitonError(SolitonLabError):
    """No nonconstant translating soliton exists for the requested constants."""


class RangeEmpty(NoSolitonError):
    pass


class DegenerateEnergy(NoSolitonError):
    """Integrand is affine in curvature (or constant), so the first integral is trivial."""


class StiffnessError(SolitonLabError):
    pass


class DomainExit(SolitonLabError):
    pass


class SingularEndpoint(SolitonLabError, ValueError):
    pass


class StepTooLarge(SolitonLabError):
    def __init__(self, dt, bound):
        super().__init__(f"time step {dt:.6g} exceeds stability bound {bound:.6g}")
        self.dt = dt
        self.bound = bound


class IllPosedFlow(DomainError):
    """Normal speed decreases with curvature: backward-parabolic, cannot be time-stepped."""


class ExtinctionReached(SolitonLabError):
    pass


class DegenerateEdge(SolitonLabError, ValueError):
    pass


class SupportExceedsCurve(SolitonLabError, ValueError):
    pass


class InsufficientSnapshots(SolitonLabError, ValueError):
    pass


class SpanExceeded(SolitonLabError, ValueError):
    pass
