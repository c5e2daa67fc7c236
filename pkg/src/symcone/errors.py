"""Exception hierarchy shared by all modules."""


class SymConeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SymConeError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class PoleError(DomainError):
    pass


class InvalidStep(DomainError):
    pass


class BackendMismatch(SymConeError, TypeError):
    pass


class SingularElement(DomainError):
    pass


class NotInCone(DomainError):
    pass


class NotInClosedCone(DomainError):
    pass


class NotInDomain(DomainError):
    pass


class BranchViolation(DomainError):
    pass


class UnsupportedBackend(SymConeError, NotImplementedError):
    pass


class WeightLimitExceeded(SymConeError, ValueError):
    pass


class WallachSingularity(DomainError):
    pass


class WallachRankViolation(DomainError):
    pass


class OutsideContinuousWallach(DomainError):
    pass


class DegenerateDenominator(DomainError):
    pass


class TruncationNotConverged(SymConeError, ArithmeticError):
    pass


class QuadratureNotConverged(SymConeError, ArithmeticError):
    pass
