"""Exception types shared across the package."""

from __future__ import annotations


class FillgamesError(Exception):
    """Base class for all package errors."""


class ValidationError(FillgamesError):
    """An instance (or state) violates a structural invariant.

    Carries the full list of violations so callers can report every
    problem at once instead of fixing them one by one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class EnumerationOverflowError(FillgamesError):
    """Strategy enumeration exceeded its limit.

    ``at_least`` is a lower bound on the true count (the enumeration was
    aborted, never silently truncated).
    """

    def __init__(self, limit, at_least):
        self.limit = limit
        self.at_least = at_least
        super().__init__(
            f"strategy enumeration exceeded limit {limit} (count is at least {at_least})"
        )


class BudgetExceededError(FillgamesError):
    """A combinatorial search exceeded its configured budget."""

    def __init__(self, budget, what):
        self.budget = budget
        self.what = what
        super().__init__(f"budget of {budget} exceeded while {what}")


class EngineError(FillgamesError):
    """Misuse of the filling engine (e.g. non-monotone rates without the
    nonstandard option) or an unrecoverable internal inconsistency."""


class StepLimitError(FillgamesError):
    """Improvement dynamics hit its step limit; carries the partial trace."""

    def __init__(self, limit, trace):
        self.limit = limit
        self.trace = trace
        super().__init__(f"improvement dynamics did not converge within {limit} steps")
