"""Exception types shared across the package."""


class DomainError(ValueError):
    """A precondition or invariant of the mathematical domain was violated."""


class BudgetError(DomainError):
    """A combinatorial enumeration would exceed the configured desk-scale budget."""


class PrecisionExhausted(DomainError):
    """A branch decision could not be verified at the working precision."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"branch undecidable at step {step}")
