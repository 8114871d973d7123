"""Exception types shared across the package."""


class AHGError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(AHGError, ValueError):
    """Malformed graph or vertex set (self-loop, out-of-range id, non-subset)."""


class ParameterError(AHGError, ValueError):
    """Gadget or reduction parameters outside their legal range."""


class ContractError(AHGError, ValueError):
    """An operation was called with arguments violating its precondition."""


class CapacityError(AHGError, RuntimeError):
    """A size guard on an exhaustive search was exceeded."""


class InvariantViolation(AHGError, AssertionError):
    """Internal consistency check failed; indicates a bug."""


class ParseError(AHGError, ValueError):
    """Instance text could not be parsed."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(AHGError, ValueError):
    """Instance parsed but is semantically invalid."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
