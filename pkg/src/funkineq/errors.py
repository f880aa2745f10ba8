"""Exception and warning types shared by every module."""


class FunkineqError(Exception):
    """Base class for library errors."""


class NonFiniteIntegrand(FunkineqError, ArithmeticError):
    """An integrand produced inf or nan at a quadrature node."""


class DivergentIntegral(NonFiniteIntegrand):
    """The weighted tail does not vanish when the truncation radius grows."""


class ToleranceNotMet(FunkineqError, ArithmeticError):
    """Adaptive refinement was exhausted before the error target was reached."""


class DomainError(FunkineqError, ValueError):
    """An argument lies outside the domain of the operation."""


class RangeError(FunkineqError, ValueError):
    """A requested value lies outside the range of a monotone function."""


class Unbounded(FunkineqError, ArithmeticError):
    """A supremum is still growing at the edge of the search window."""


class NotLogConcave(FunkineqError, ValueError):
    """A transport map failed its sampled 1-Lipschitz check."""


class TruncationWarning(UserWarning):
    """Boundary terms of a truncated sum are not negligible."""
