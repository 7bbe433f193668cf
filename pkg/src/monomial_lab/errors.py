"""Exception types raised across the toolkit."""


class MonomialLabError(Exception):
    """Base class for every error raised by monomial_lab."""


class ModeError(MonomialLabError, TypeError):
    """A float value leaked into an exact-mode computation (or vice versa)."""


class EvaluationError(MonomialLabError, ArithmeticError):
    """A function handle could not be evaluated at the requested point."""


class OutOfRange(EvaluationError):
    """Argument beyond the handle's evaluable range, or a non-finite result."""


class InvalidFamily(MonomialLabError, ValueError):
    pass


class EmptyGrid(MonomialLabError, ValueError):
    pass


class NotASolution(MonomialLabError):
    """The function does not satisfy Df = 0 on the sample closure."""

    def __init__(self, message, point=None, residual=None):
        super().__init__(message)
        self.point = point
        self.residual = residual


class FloatModeUnsupported(MonomialLabError):
    pass


class GPViolation(MonomialLabError):
    """Validation node disagrees with the reconstructed generalized polynomial."""


class InsufficientSamples(MonomialLabError, ValueError):
    pass


class DegenerateRatioError(MonomialLabError):
    """The scaling ratio is 0 or has modulus 1, so no contraction branch exists."""


class VariantPreconditionFailed(MonomialLabError):
    pass


class NotContractive(MonomialLabError):
    def __init__(self, message, lipschitz=None):
        super().__init__(message)
        self.lipschitz = lipschitz


class AllZeroPsi(MonomialLabError):
    pass


class NonZeroAtOrigin(MonomialLabError):
    pass


class NoConvergence(MonomialLabError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DomainOverflow(MonomialLabError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ParseError(MonomialLabError, ValueError):
    """Syntax error in a function spec; ``pos`` is a 0-based column."""

    def __init__(self, message, pos, expected=()):
        self.pos = pos
        self.expected = tuple(sorted(expected))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at column {pos}{detail}")
