"""Exception hierarchy.

Every error raised on purpose by the package derives from ``ShadowError`` so
callers (and the CLI) can separate domain failures from programming bugs.
"""


class ShadowError(Exception):
    pass


class InvalidArgument(ShadowError, ValueError):
    pass


class DimensionMismatch(ShadowError, ValueError):
    pass


class NoUniqueLift(ShadowError):
    """A jump is too large for the covering projection to be inverted locally."""


class NotHyperbolic(ShadowError):
    pass


class ConeCheckFailed(ShadowError):
    pass


class SupportEscapesWindow(ShadowError):
    pass


class CocycleWindowTooSmall(ShadowError):
    pass


class SingularSystem(ShadowError):
    pass


class NotLinear(ShadowError):
    pass


class NotProductDecomposable(ShadowError):
    pass


class OrbitEscapes(ShadowError):
    pass


class NoCenterDirection(ShadowError):
    pass


class NoConvergence(ShadowError):
    """Raised by the fixed-point solver; ``result`` holds the last iterate."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
