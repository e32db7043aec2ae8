"""Exception hierarchy shared by the library and the CLI."""


class NormboundError(Exception):
    """Base class for all library errors."""


class DomainError(NormboundError, ValueError):
    """An argument lies outside the domain of the operation."""


class BudgetError(NormboundError, OverflowError):
    """An exact computation would exceed its enumeration budget."""


class ValidationError(NormboundError, ValueError):
    """A model or corpus violates a declared condition.

    ``path`` locates the offending node, e.g. ``$.steps[1].branches[0]``.
    """

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


class SchemaError(ValidationError):
    """An input document does not follow the ``normbound/1`` schema."""
