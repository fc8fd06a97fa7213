"""Exception hierarchy shared by all supergrass modules."""


class SupergrassError(Exception):
    """Base class for all library errors."""


class ConfigurationError(SupergrassError):
    """Mismatched algebras, bad generator index, or invalid session setup."""


class NotInvertible(SupergrassError):
    """Raised when inverting (or taking sqrt of) an element with zero body."""


class ParityError(SupergrassError):
    """An operation received an element of the wrong Grassmann parity."""


class DomainError(SupergrassError):
    """Parameter outside the admissible domain of an operation."""


class DegenerateStateError(SupergrassError):
    """A state whose norm has no invertible body cannot be normalized."""


class ConvergenceError(SupergrassError):
    """Iterative evaluation (matrix exponential) failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class EigenvalueConstraintViolated(SupergrassError):
    """An imposed eigenvalue condition does not hold for the given data."""

    def __init__(self, condition, detail=""):
        self.condition = condition
        msg = f"eigenvalue constraint violated: {condition}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class UnsupportedRegime(SupergrassError):
    """Coefficient pattern outside the implemented solver branches."""


class NoSolutionAtLevel(SupergrassError):
    """The grade-by-grade lift is inconsistent at some blade level."""

    def __init__(self, level, residual):
        self.level = level
        self.residual = residual
        super().__init__(
            f"no solution at blade level {level} (lift residual {residual:.3e})"
        )


class TruncationWarning(UserWarning):
    """Components were pushed above the Fock cutoff and dropped."""


class ExprSyntaxError(SupergrassError):
    """Parse error in a Grassmann expression; carries position info."""

    def __init__(self, message, position, expected=None):
        self.position = position
        self.expected = expected
        detail = f" at position {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(message + detail)


class GeneratorOutOfRange(ExprSyntaxError):
    """A generator symbol exceeds the algebra order."""


class DocumentError(SupergrassError):
    """A state document is malformed or has an unsupported version."""
