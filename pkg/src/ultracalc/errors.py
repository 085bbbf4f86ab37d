"""Exception types shared across the package."""


class UltracalcError(Exception):
    """Base class for all ultracalc errors."""


class InvalidArgumentError(UltracalcError, ValueError):
    """An argument violates a documented precondition."""


class IndependenceError(UltracalcError):
    """A proposed interpolation point set cannot support a basis."""


class QuadratureError(UltracalcError):
    """Adaptive quadrature failed to converge on a cell.

    Carries the index of the offending cell in ``cell_index``.
    """

    def __init__(self, message: str, cell_index: int):
        super().__init__(message)
        self.cell_index = cell_index


class PreconditionError(UltracalcError):
    """An identity was requested for inputs outside its hypotheses."""


class InsufficientDataError(UltracalcError):
    """Not enough refinement stages to estimate a convergence order."""
