"""Exception hierarchy. The CLI maps these onto exit codes."""


class DiracBoundError(Exception):
    exit_code = 2


class DimensionError(DiracBoundError, ValueError):
    pass


class ParameterError(DiracBoundError, ValueError):
    pass


class ShapeError(DiracBoundError, ValueError):
    pass


class ResolutionError(DiracBoundError, ValueError):
    pass


class CapabilityError(DiracBoundError, NotImplementedError):
    pass


class NoBoundaryError(DiracBoundError, ValueError):
    pass


class SymmetryError(DiracBoundError, ValueError):
    pass


class ArgumentError(DiracBoundError, ValueError):
    pass


class ConvergenceError(DiracBoundError, RuntimeError):
    """Solver failed; carries the best residual reached."""

    exit_code = 3

    def __init__(self, message, best_residual=float("nan")):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual


class IncompleteSearchError(ConvergenceError):
    pass
