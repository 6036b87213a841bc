"""Shared exception types."""


class BudgetExceededError(ValueError):
    """An exhaustive operation would exceed its stated size budget.

    Raised instead of silently truncating: enumeration over realizations,
    odd-set checks and similar exponential scans refuse inputs larger than
    their budget, naming the limit in the message.
    """


class GraphFormatError(ValueError):
    """A graph file does not follow the expected text format."""
