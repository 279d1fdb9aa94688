"""Exception hierarchy shared across the package."""


class OrliczLabError(Exception):
    """Base class for all package errors."""


class DomainError(OrliczLabError, ValueError):
    """Input outside the mathematical domain of an operation (e.g. negative
    argument where a modulus is required, non-positive mass)."""


class TableRangeError(OrliczLabError, ValueError):
    """Tabulated function evaluated outside its table range."""


class NumericError(OrliczLabError, ArithmeticError):
    """A numeric routine failed to converge or bracket its target."""


class ArgumentError(OrliczLabError, ValueError):
    """Structurally invalid argument (mismatched spaces, bad enum value,
    malformed table)."""


class PreconditionError(OrliczLabError, ValueError):
    """A certified precondition sweep failed, so the operation refuses to
    report a value that its hypotheses do not back."""


class ConfigError(OrliczLabError, ValueError):
    """Configuration file or expression could not be parsed.  The message
    names the offending field path."""
