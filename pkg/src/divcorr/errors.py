"""Exception types shared by the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ModeError(ValueError):
    """Exact (rational) arithmetic was requested for non-rational data."""


class ResourceError(MemoryError):
    """A table could not be allocated for the requested size."""

    def __init__(self, message: str, limit: int | None = None):
        super().__init__(message)
        self.limit = limit
