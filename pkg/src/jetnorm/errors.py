"""Exception hierarchy.

Everything raised on bad input derives from :class:`InvalidInputError`
(CLI exit code 3); size refusals raise :class:`GuardrailError` (exit code 2).
"""


class JetnormError(Exception):
    """Base class for all library errors."""


class InvalidInputError(JetnormError, ValueError):
    pass


class ConfigurationError(InvalidInputError):
    pass


class ShapeError(InvalidInputError):
    pass


class TruncationMismatchError(InvalidInputError):
    pass


class DegreeRangeError(InvalidInputError):
    pass


class SingularConstantTermError(InvalidInputError):
    pass


class NotInSubspaceError(InvalidInputError):
    pass


class ParseError(InvalidInputError):
    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{message}{where}")


class UnknownVariableError(ParseError):
    def __init__(self, name, line=None, col=None):
        self.name = name
        super().__init__(f"unknown variable {name!r}", line, col)


class GuardrailError(JetnormError):
    """A computation would exceed the configured size cap."""
