"""Exception hierarchy.

Input problems derive from ``InputError`` (CLI exit code 2); numerical
failures derive from ``NumericalError`` (CLI exit code 3).
"""


class VolintError(Exception):
    pass


class InputError(VolintError, ValueError):
    pass


class NumericalError(VolintError, ArithmeticError):
    pass


class SizeLimitError(InputError):
    pass


class DegreeError(InputError):
    pass


class ValueSemanticsError(InputError, TypeError):
    pass


class SchemaError(InputError):
    pass


class CoverageError(InputError):
    """A point of R is not covered exactly once by the translates of a domain."""


class DegeneracyError(NumericalError):
    """Classification or decomposition is ambiguous at the requested tolerance."""


class NonConvergenceError(NumericalError):
    pass


class ShapeDegenerationError(NumericalError):
    pass
