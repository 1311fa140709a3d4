"""Exception types raised by the solver stack."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class AccuracyError(ArithmeticError):
    """A special-function evaluation cannot certify its target accuracy."""


class SingularSystemError(ArithmeticError):
    """A local 2x2 collocation system is (numerically) singular."""


class ZeroCoefficientError(ArithmeticError):
    """The coefficient H(t) of the integral equation vanishes at a collocation point."""
