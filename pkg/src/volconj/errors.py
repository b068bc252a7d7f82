"""Exception types.

Errors split into two families so the command line can map them to exit
codes: ``DomainError`` for inputs outside a function's admissible range and
``NumericalError`` for numerical procedures that failed to deliver.
"""


class VolConjError(Exception):
    pass


class DomainError(VolConjError, ValueError):
    """Argument outside the admissible domain of an operation."""


class RangeError(DomainError):
    """Integer index (weight, summation index, factorial order) out of range."""


class CutPointError(DomainError):
    """Argument lies exactly on the interior of a branch cut."""


class BranchCutError(DomainError):
    pass


class NumericalError(VolConjError, ArithmeticError):
    """A numerical procedure could not meet its contract."""


class QuadratureError(NumericalError):
    pass


class RealnessError(NumericalError):
    """A quantity that must be real came out with a non-real phase."""


class RootNotFoundError(NumericalError):
    pass


class BracketError(NumericalError):
    pass


class FitError(NumericalError):
    pass


class SingularityError(NumericalError):
    pass


class ResolutionError(NumericalError):
    pass
