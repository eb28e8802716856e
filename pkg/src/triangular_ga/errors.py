"""Exception hierarchy shared by every module of the package."""


class AlgebraError(Exception):
    """Base class for all errors raised by triangular_ga."""


class DivisibilityError(AlgebraError, ArithmeticError):
    """An exact division was requested but the quotient does not exist in the ring."""


class VariableError(AlgebraError, ValueError):
    """A variable is unknown, duplicated or incompatible with a variable set."""


class NotInvertibleError(AlgebraError, ArithmeticError):
    """An element or a polynomial map that should be invertible is not."""


class DegenerateError(AlgebraError, ValueError):
    """The input hits a degenerate case the operation does not cover."""


class PreconditionError(AlgebraError, ValueError):
    """An operation was called outside its documented domain."""


class InternalError(AlgebraError, RuntimeError):
    """A construction that is guaranteed to succeed failed: this is a bug."""


class InternalConsistencyError(InternalError):
    """Two independent computations that must agree disagree."""


class SearchBudgetError(AlgebraError, RuntimeError):
    """A bounded search ran out of candidates."""


class UnsupportedSplittingError(AlgebraError, NotImplementedError):
    """No splitting algebra can be built automatically for this polynomial."""


class NotASliceError(AlgebraError, ValueError):
    """The proposed element s does not satisfy ds = 1."""

    def __init__(self, image):
        self.image = image
        super().__init__(f"not a slice: derivation maps it to {image}")


class ParseError(AlgebraError, ValueError):
    """Malformed polynomial text or input document."""

    def __init__(self, message, line=1, column=1, text=None):
        self.message = message
        self.line = line
        self.column = column
        self.text = text
        super().__init__(f"{message} (line {line}, column {column})")


class SchemaError(AlgebraError, ValueError):
    """An input or report document does not follow the expected schema."""
