"""Exception hierarchy shared by all modules."""


class LadderError(Exception):
    """Base class for every error raised by jladder."""


class DomainError(LadderError, ValueError):
    """Argument outside the region where an evaluation is permitted."""


class RangeError(LadderError, ValueError):
    """Requested value lies outside a table's covered image or range."""


class ConstraintError(LadderError, ValueError):
    """Segment violates the admissible length bound U <= T / ln T."""


class ConvergenceError(LadderError, ArithmeticError):
    """Iteration failed to meet its tolerance."""


class ResourceError(LadderError, MemoryError):
    """Requested work exceeds a configured cap."""
