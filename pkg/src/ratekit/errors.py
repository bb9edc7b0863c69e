"""Exception hierarchy.

Input problems derive from :class:`InvalidInput` (CLI exit status 2),
numerical non-convergence from :class:`NumericalFailure` (exit status 3).
"""


class RatekitError(Exception):
    pass


class InvalidInput(RatekitError, ValueError):
    pass


class NumericalFailure(RatekitError, ArithmeticError):
    pass


class PoleError(InvalidInput):
    """Argument sits on (or within tolerance of) a gamma-function pole."""


class DomainError(InvalidInput):
    pass


class UnsupportedVariant(InvalidInput):
    pass


class NonIntegerRatio(InvalidInput):
    """delta/rho is not a positive integer, so no Meijer-G reduction exists."""


class StripViolation(InvalidInput):
    pass


class ContourError(InvalidInput):
    """The integration line does not separate the left and right pole families."""


class UnsupportedShape(InvalidInput):
    pass


class ConvergenceError(NumericalFailure):
    pass


class TruncationError(NumericalFailure):
    pass


class DivergenceError(NumericalFailure):
    pass


class CoincidentPoleError(NumericalFailure):
    """Two left pole families overlap; the residue series would need log terms."""


class StepTooSmall(NumericalFailure):
    pass


class MethodDisagreement(RatekitError):
    def __init__(self, first, second, message=None):
        self.first = first
        self.second = second
        super().__init__(
            message
            or f"{first.method.value} gave {first.value!r} (+/- {first.abs_error_estimate:.3g}) but "
            f"{second.method.value} gave {second.value!r} (+/- {second.abs_error_estimate:.3g})"
        )
