"""Exception hierarchy shared by every module."""


class CurvlieError(Exception):
    """Base class for all library errors."""


class AlgebraValidationError(CurvlieError, ValueError):
    """Structure constants or metric fail a Lie algebra invariant."""

    def __init__(self, message, triple=None, residual=None):
        super().__init__(message)
        self.triple = triple
        self.residual = residual


class AntisymmetryViolation(AlgebraValidationError):
    pass


class JacobiViolation(AlgebraValidationError):
    pass


class MetricNotAdInvariant(AlgebraValidationError):
    pass


class MetricNotPositiveDefinite(AlgebraValidationError):
    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class FactorViolation(AlgebraValidationError):
    """Declared factors are not orthogonal commuting ideals."""


class SubalgebraNotClosed(CurvlieError, ValueError):
    pass


class NotSymmetric(CurvlieError, ValueError):
    pass


class NotPositiveDefinite(CurvlieError, ValueError):
    pass


class OutOfDomain(CurvlieError, ValueError):
    """Path parameter lies outside the open interval where I - t*Psi > 0."""


class DomainTooSmall(CurvlieError, ValueError):
    pass


class SubalgebraNotAbelian(CurvlieError, ValueError):
    pass


class FactorsMissing(CurvlieError, ValueError):
    pass


class PlaneNotInvariant(CurvlieError, ValueError):
    pass


class PlaneNotSplit(CurvlieError, ValueError):
    pass


class NonPositiveLambda(CurvlieError, ValueError):
    pass
