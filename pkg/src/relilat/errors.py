"""Exception hierarchy shared by every relilat module."""


class RelilatError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(RelilatError, ValueError):
    pass


class DomainError(RelilatError, ValueError):
    pass


class RangeError(RelilatError, ValueError):
    pass


class NonBooleanInput(RelilatError, ValueError):
    pass


class NotSemicoherent(RelilatError, ValueError):
    """Raised when a boolean set function is not monotone and nonconstant."""


class EmptyCover(RelilatError, ValueError):
    pass


class MonotonicityError(RelilatError, ValueError):
    pass


class ModelMismatch(RelilatError, ValueError):
    pass


class NumericalError(RelilatError, ArithmeticError):
    pass


class NonconvergenceError(NumericalError):
    pass


class IdentityViolation(RelilatError, AssertionError):
    """A sampled lifetime vector broke Ind(p_w(T) > t) == phi_{v_t}(X(t))."""


class InfiniteSample(RelilatError, ValueError):
    pass


class ParseError(RelilatError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ParseError):
    pass
