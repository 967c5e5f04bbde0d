"""Exception hierarchy shared by every module."""


class MobPompError(Exception):
    """Base class for all package errors."""


class InputError(MobPompError, ValueError):
    """Malformed or out-of-domain input (non-finite coordinates, bad shapes)."""


class NorthPoleProjection(InputError):
    """Raised when projecting the north pole of the Riemann sphere."""


class InsufficientPoints(InputError):
    pass


class DegenerateTriangle(InputError):
    """Two of the fixed vertices coincide, so some side length is zero."""


class AntipodalPoints(InputError):
    pass


class DegenerateConic(MobPompError, ArithmeticError):
    """The quadratic coefficient of a circle equation vanishes."""


class IllConditionedSample(MobPompError, ArithmeticError):
    """Interpolation matrix stayed numerically singular after resampling."""


class IoFailure(MobPompError, OSError):
    pass
