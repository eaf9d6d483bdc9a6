"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed expression or input file; ``pos`` is a character offset."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class PoleError(ZeroDivisionError):
    """A denominator factor vanishes at the requested specialization point."""


class InvalidModelError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid model")


class PreconditionError(ValueError):
    """Input violates a hypothesis of the requested computation."""


class CapExceededError(RuntimeError):
    """Requested enumeration is larger than the configured point cap."""
