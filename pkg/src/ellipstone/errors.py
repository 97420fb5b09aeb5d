"""Exception hierarchy.

Domain errors (bad input, violated preconditions) derive from
:class:`EllipstoneError`.  Failures of a numerical procedure to reach its
accuracy target derive from :class:`NumericalFailure`; the CLI maps those to
exit status 3.
"""


class EllipstoneError(ValueError):
    pass


class NumericalFailure(ArithmeticError):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DegreeMismatch(EllipstoneError):
    pass


class ArityMismatch(EllipstoneError):
    pass


class LambdaOutOfRange(EllipstoneError):
    pass


class PointInside(EllipstoneError):
    pass


class DegenerateFocal(EllipstoneError):
    pass


class HarmonicityViolated(EllipstoneError):
    pass


class IrrationalScaling(EllipstoneError):
    pass


class PointNotExterior(EllipstoneError):
    pass


class PointNotInCavity(EllipstoneError):
    pass


class PathTouchesFocalSet(EllipstoneError):
    pass


class TargetAccuracyNotMet(NumericalFailure):
    pass


class FitResidualTooLarge(NumericalFailure):
    pass


class NumericallySingular(NumericalFailure):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition
