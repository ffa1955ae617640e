""" Exception hierarchy shared by every module and the CLI """


class CoseaError(Exception):
    """Base class for all effect-algebra errors.

    `residual` carries the offending magnitude when one exists (e.g. how far a sum leaves the unit interval),
    `name` the offending named object when the error comes from a document.
    """

    def __init__(self, message="", residual=None, name=None):
        super().__init__(message)
        self.residual = residual
        self.name = name


class InvalidTolerance(CoseaError):
    pass


# Effect-algebra operations
class NotOrthogonal(CoseaError):
    pass


class BackendMismatch(CoseaError):
    pass


class NotDominated(CoseaError):
    pass


class ScalarOutOfRange(CoseaError):
    pass


# Constructors
class NotHermitian(CoseaError):
    pass


class OutOfInterval(CoseaError):
    pass


class NotUnitary(CoseaError):
    pass


class NotOneDimensional(CoseaError):
    pass


class ArityMismatch(CoseaError):
    pass


class InvalidContext(CoseaError):
    pass


class NotConvex(CoseaError):
    pass


# Structure
class NotSharp(CoseaError):
    pass


class NotCentral(CoseaError):
    pass


class TrivialSplit(CoseaError):
    pass


class DegenerateGeneric(CoseaError):
    """The random central element had coinciding eigenvalue clusters on every retry"""
    pass


class NotCommuting(CoseaError):
    pass


# Spectral
class ZeroEffect(CoseaError):
    pass


class NotInvertible(CoseaError):
    pass


# Conditioning
class ZeroProbability(CoseaError):
    pass


class PreconditionUnsatisfied(CoseaError):
    pass


# Representation
class NotRepresentable(CoseaError):
    pass


class ComparabilityViolated(CoseaError):
    pass


class IncompleteData(CoseaError):
    pass


# Documents and reports
class ParseError(CoseaError):
    """Malformed document text; `line` and `column` are 1-based when known"""

    def __init__(self, message="", line=None, column=None, name=None):
        super().__init__(message, name=name)
        self.line = line
        self.column = column

    def __str__(self):
        where = f" (line {self.line}, column {self.column})" if self.line is not None else ""
        return f"{super().__str__()}{where}"


class ValidationError(CoseaError):
    def __str__(self):
        prefix = f"{self.name}: " if self.name is not None else ""
        return f"{prefix}{super().__str__()}"


class UnknownName(CoseaError):
    pass


class IoError(CoseaError):
    pass
