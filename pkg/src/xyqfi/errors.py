"""Exception hierarchy shared by all modules."""


class XYQFIError(Exception):
    """Base class for every error raised by the package."""


class InvalidParameters(XYQFIError, ValueError):
    pass


class NonConvergence(XYQFIError):
    """Adaptive quadrature exhausted its budget or lost precision."""


class PositivityViolation(XYQFIError):
    """A reduced density matrix failed its trace/PSD checks."""


class DegenerateFit(XYQFIError):
    pass


class PureStateDegeneracy(XYQFIError):
    """The single-spin state is (numerically) pure, 1 - m^2 ~ 0."""


class DegenerateDenominator(XYQFIError):
    pass


class DegenerateOutcome(XYQFIError):
    """A magnetization outcome probability underflowed."""


class DegenerateBlock(XYQFIError):
    """An X-state block is rank deficient, so its SLD is not unique."""


class ZeroQfi(XYQFIError):
    pass


class ZeroTrace(XYQFIError):
    pass


class BoundViolation(XYQFIError):
    """F > H or saturation > 1 beyond tolerance."""
