"""Exception types shared by the package."""


class DomainError(ValueError):
    """Input violates an operation's precondition."""


class ResourceLimitError(RuntimeError):
    """An exhaustive search would exceed its configured guard."""
