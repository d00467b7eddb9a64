"""Exception types raised by the numerical layers."""


class MkdvSurfError(Exception):
    """Base class for all package errors."""


class GridError(MkdvSurfError, ValueError):
    pass


class NonZeroMean(MkdvSurfError):
    """The inverse derivative was applied to a function that is not a total derivative."""


class NonMonotoneParameter(MkdvSurfError, ValueError):
    pass


class DecayError(MkdvSurfError, ValueError):
    """Samples on a truncated line do not decay at the endpoints."""


class AxisContact(MkdvSurfError, ValueError):
    pass


class ToleranceNotMet(MkdvSurfError):
    pass


class SlopeBound(MkdvSurfError, ValueError):
    pass


class NonPeriodicTheta(MkdvSurfError, ValueError):
    pass


class BranchSingularity(MkdvSurfError):
    pass


class DomainKind(MkdvSurfError, ValueError):
    pass


class ParameterDomain(MkdvSurfError, ValueError):
    pass


class DepthLimit(MkdvSurfError, ValueError):
    pass


class DegenerateFit(MkdvSurfError):
    pass


class NoClosedSpinor(MkdvSurfError):
    """The monodromy of the linear problem has no eigenvalue at +1 or -1."""


class Instability(MkdvSurfError):
    pass


class CenterOnSurface(MkdvSurfError, ValueError):
    pass


class ProfileFormatError(MkdvSurfError, ValueError):
    pass
