"""Exception hierarchy shared by every layer of the engine."""


class KoszulCurveError(Exception):
    """Base class for all errors raised by koszulcurve."""


class FieldMismatchError(KoszulCurveError):
    """Entries or operands live over different fields."""


class UnsupportedFieldError(KoszulCurveError):
    """The requested operation is not available over this field."""


class RationalSizeError(KoszulCurveError):
    """A rational matrix is too large for exact elimination; use F_p mode."""


class SingularPointError(KoszulCurveError):
    """Hensel lifting hit a vanishing derivative."""


class InvalidModelError(KoszulCurveError):
    """A curve model violates its defining invariants (singular, not squarefree, ...)."""


class InvalidDivisorError(KoszulCurveError):
    """A divisor refers to a point that is not on the curve, or is malformed."""


class NormalizationError(InvalidDivisorError):
    """A divisor is not in the normalized shape m*base - E."""


class ShiftFailure(KoszulCurveError):
    """No supported principal divisor moves the given point off the positive part."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class InternalError(KoszulCurveError):
    """An internal consistency check failed (bookkeeping bug)."""


class RangeError(KoszulCurveError):
    """A graded piece needed by a differential was not computed."""


class UsageError(KoszulCurveError):
    """A precondition of a public operation is violated."""


class ClassificationError(KoszulCurveError):
    """A p-very ample bundle fits none of the small-h0 branches."""


class ParseError(KoszulCurveError):
    """Syntax error in a job file, polynomial or divisor expression."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc += ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column
