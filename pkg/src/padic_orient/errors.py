"""Exception types raised across the engine."""


class OrientError(Exception):
    """Base class for all engine errors."""


class ParameterError(OrientError, ValueError):
    pass


class NonUnit(OrientError, ArithmeticError):
    """Division by an element that is not invertible in its ring."""


class RingMismatch(OrientError, TypeError):
    pass


class DenominatorNotPrime(OrientError, ArithmeticError):
    """A rational coefficient has p in its denominator and cannot be reduced mod p^M."""


class UntaggedForm(OrientError, ValueError):
    """An operator needing a nebentypus was handed a form without one."""


class InsufficientPrecision(OrientError, ArithmeticError):
    pass


class DegenerateBasis(OrientError, ValueError):
    """The supplied basis is linearly dependent at the working q-precision."""
