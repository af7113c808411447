"""Exception types shared across the package."""


class FbrateError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(FbrateError, ValueError):
    """A channel parameter is out of range, non-finite, or conflicts with a preset."""


class ClosedFormUnavailableError(FbrateError, ValueError):
    """The pole/residue closed form does not exist for these parameters.

    Raised when the shadowing index is not a positive integer, the cluster
    count is not a positive even integer (outside the zero-LoS shortcut), or
    the total pole multiplicity would be unreasonably large.  Callers should
    fall back to the quadrature engine.
    """


class ConvergenceError(FbrateError, RuntimeError):
    """A numerical routine failed to reach its accuracy target.

    Attributes:
        achieved: best error estimate reached before giving up (may be None).
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
