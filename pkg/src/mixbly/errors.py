"""Exception types raised across the package."""


class MixBLYError(Exception):
    """Base class for all package errors."""


class DomainError(MixBLYError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class AccuracyError(MixBLYError, ArithmeticError):
    """A quadrature or iteration failed to reach its accuracy target.

    The achieved error estimate is kept on ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ContractError(MixBLYError, ValueError):
    """Inputs violate a structural contract (shape, ordering, dimension)."""


class RegimeError(MixBLYError, ValueError):
    """Operator parameters fall outside every admissible regime."""


class DegenerateProblemError(MixBLYError, ValueError):
    pass


class MalformedFunctionError(MixBLYError, ValueError):
    pass


class DefinitenessError(MixBLYError, ArithmeticError):
    """A matrix expected to be positive definite is not."""


class NumericError(MixBLYError, ArithmeticError):
    pass


class ResolutionError(MixBLYError, ValueError):
    pass
