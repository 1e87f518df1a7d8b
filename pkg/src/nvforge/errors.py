"""Exception hierarchy.

The CLI maps ``ParseError`` / ``ValidationError`` subclasses to exit code 2
and ``ModelError`` subclasses to exit code 3, printing the class name.
"""


class NVForgeError(Exception):
    """Base class for all package errors."""


class ValidationError(NVForgeError, ValueError):
    """Input violates a documented invariant."""


class ParseError(ValidationError):
    """Malformed input file. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateWavelength(ParseError):
    pass


class TooShort(ParseError):
    pass


class UnknownTable(ValidationError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ModelError(NVForgeError):
    """A model could not produce a result for valid-looking input."""


class ZeroDenominator(ModelError, ZeroDivisionError):
    pass


class InsufficientData(ModelError):
    pass


class DegenerateData(ModelError):
    pass


class NonConvergence(ModelError):
    pass


class UnknownEnergy(ModelError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class EnergyMismatch(ModelError):
    pass


class ModelOverrun(ModelError):
    pass


class OutOfRange(ModelError):
    pass


class NonPositiveThickness(ValidationError):
    pass


class DegenerateReferences(ModelError):
    pass


class EmptyOverlap(ModelError):
    pass


class KindMismatch(ValidationError):
    pass


class DegenerateSignal(ModelError):
    pass


class WindowOutOfRange(ModelError):
    pass


class BadCalibration(ValidationError):
    pass


class NoFeasibleFluence(ModelError):
    pass


class UncalibratedEnergy(ModelError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NonMonotoneConstraint(ModelError):
    pass


class NoFeasibleRecipe(ModelError):
    pass
