"""Exception types raised across the package."""


class EnergyScreenError(Exception):
    """Base class for all package errors."""


class PreconditionError(EnergyScreenError, ValueError):
    """An input violates an operation's precondition (sizes, domains)."""


class ConfigurationError(EnergyScreenError, ValueError):
    """A configuration value is invalid or a required plug-in is missing."""


class DataError(EnergyScreenError, ValueError):
    """Input data is structurally valid but semantically unusable."""


class CsvParseError(DataError):
    """A CSV file could not be parsed; carries the offending location."""

    def __init__(self, path, line, column, message):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}: line {line}, column {column}: {message}")
