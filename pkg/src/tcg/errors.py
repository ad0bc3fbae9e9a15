"""Exception types shared across the package."""


class TCGError(Exception):
    """Base class for all package errors."""


class NotATree(TCGError):
    """The profile's activated edges contain a cycle among agents."""

    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__(f"profile is not a spanning tree; cycle through nodes {list(self.cycle)}")


class ParseError(TCGError):
    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} (at offset {position})")


class ResourceLimit(TCGError):
    """A configured enumeration, search or construction cap was exceeded."""


class ConstructionLimit(ResourceLimit):
    pass


class SearchBudgetExceeded(ResourceLimit):
    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class InvalidPolicy(TCGError, ValueError):
    pass


class InvalidNodes(TCGError, ValueError):
    """Node arguments violate the positional relations a predicate requires."""
