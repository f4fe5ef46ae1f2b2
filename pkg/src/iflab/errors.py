"""Exception types shared across the package."""


class DefinitenessError(ValueError):
    """Cholesky input is not positive definite (pivot at or below threshold)."""


class SearchFailureError(RuntimeError):
    """Integer-matrix search did not terminate within its iteration budget."""


class EnumerationLimitError(RuntimeError):
    """Lattice-point enumeration exceeded its vector budget.

    Carries the bound accumulated so far in ``partial`` so callers can
    distinguish "too expensive" from "wrong".
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
