from typing import Any


class SoftmaxToolkitError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidInputError(SoftmaxToolkitError, ValueError):
    """Input violates a precondition (non-finite entry, bad shape, off-simplex, ...)."""


class InvalidReferenceError(InvalidInputError):
    """Lyapunov reference point is not a rest point of the score dynamics."""


class IntegrationDivergedError(SoftmaxToolkitError, ArithmeticError):
    def __init__(self, message: str, trajectory: Any = None):
        super().__init__(message)
        # partial trajectory up to the last finite state
        self.trajectory = trajectory


class SolverDivergedError(SoftmaxToolkitError, ArithmeticError):
    def __init__(self, message: str, iterations: int = 0):
        super().__init__(message)
        self.iterations = iterations


class NotConvergedError(SoftmaxToolkitError):
    def __init__(self, message: str, result: Any = None):
        super().__init__(message)
        self.result = result
