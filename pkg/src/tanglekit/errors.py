"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument violates a documented precondition (wrong ground set, overlap, ...)."""


class OutOfOrderError(DomainError):
    """A membership query was made for a set whose order is not below the tangle order.

    Distinct from a False answer: the tangle does not orient such sets at all.
    """


class SizeGuardError(RuntimeError):
    """An exhaustive routine refused to run because the instance exceeds its size guard."""


class IntegrityError(RuntimeError):
    """An internal consistency check failed (caller-supplied oracle is not a tangle, ...)."""


class StructuralError(RuntimeError):
    """A structural invariant that follows from submodularity was violated.

    Raising this indicates the input function is not actually symmetric and
    submodular, or there is a bug; it should never fire for valid inputs.
    """


class ParseError(ValueError):
    """Malformed instance file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
