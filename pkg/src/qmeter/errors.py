"""Exception hierarchy shared by the library and the command line."""


class QMeterError(Exception):
    """Base class for all errors raised by qmeter."""

    exit_code = 1


class ValidationError(QMeterError, ValueError):
    """An input violates a numerical invariant (norm, hermiticity, completeness...)."""


class DimensionMismatch(ValidationError):
    pass


class DomainError(QMeterError):
    """A well-formed request that the chosen operation cannot answer."""


class ParseError(QMeterError):
    """Malformed scenario document (syntax or schema)."""

    exit_code = 2
