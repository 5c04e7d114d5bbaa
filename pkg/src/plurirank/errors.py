"""Exception hierarchy."""


class PlurirankError(Exception):
    """Base class for all library errors."""


class DomainError(PlurirankError, ValueError):
    """An argument is outside the domain where the operation is defined."""


class CenterIncidence(DomainError):
    """A point lies on (or numerically near) the center of a linear projection.

    ``indices`` lists offending atom indices when the error comes from a current.
    """

    def __init__(self, message: str, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class ValidationError(PlurirankError, ValueError):
    """A dataset violates the current schema or one of its invariants."""

    def __init__(self, message: str, atom_index: int | None = None):
        if atom_index is not None:
            message = f"atom {atom_index}: {message}"
        super().__init__(message)
        self.atom_index = atom_index
