"""Exception types shared across the package."""


class BasisError(ValueError):
    """Invalid basis configuration, or an overlap matrix that is not positive definite."""


class SingularityError(ValueError):
    """A potential was evaluated at a radius where it is undefined."""


class UndefinedInputError(ValueError):
    pass


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best available estimate and its error bound are kept on the
    exception so callers can still report them.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NoRootError(RuntimeError):
    pass


class IterationLimitError(RuntimeError):
    pass


class IncompleteInputError(ValueError):
    pass


class AlignmentError(ValueError):
    def __init__(self, message: str, orphans=()):
        super().__init__(message)
        self.orphans = list(orphans)


class CalibrationInfeasibleError(RuntimeError):
    def __init__(self, message: str, profile=()):
        super().__init__(message)
        self.profile = list(profile)
