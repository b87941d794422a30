"""Exception types shared across the package."""


class JordanError(Exception):
    """Base class for all package errors."""


class ContractViolation(JordanError, ValueError):
    """An argument violates an operation's precondition."""


class NumericalFailure(JordanError, ArithmeticError):
    """An iterative kernel routine did not converge."""


class QuasiSingularError(JordanError, ArithmeticError):
    """A linear system is singular to working tolerance.

    ``pivot`` carries the magnitude of the smallest pivot encountered.
    """

    def __init__(self, message, pivot=0.0):
        super().__init__(message)
        self.pivot = pivot


class NotQuasiInvertible(QuasiSingularError):
    """The Bergman operator of a pair (x, y) is singular."""


class InvalidIdempotent(ContractViolation):
    """A pair of elements fails the idempotent identities."""


class RankDeficiency(JordanError, ArithmeticError):
    """An element has smaller numerical rank than required."""


class AmbiguousRetractionWarning(UserWarning):
    """Singular values tie at the truncation index of a retraction."""


class DegenerateSpectrumWarning(UserWarning):
    """Tied singular values make a subset structure ambiguous."""
