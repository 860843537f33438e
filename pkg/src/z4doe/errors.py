"""Exception types shared across the package."""


class Z4DomainError(ValueError):
    """A value is not an element of Z4, or a vector/column index is malformed."""


class DegenerateDesignError(ValueError):
    """The requested operation has no meaningful result for this design."""


class InfeasibleBranchError(ValueError):
    """The branch class has no matching column for the given frequency profile."""


class ResourceLimitError(RuntimeError):
    """The computation would exceed a configured size cap or search budget."""


class VerificationMismatch(AssertionError):
    """A closed-form prediction disagrees with brute-force analysis."""
