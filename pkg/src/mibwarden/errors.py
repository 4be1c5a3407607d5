"""Exception hierarchy. Each class carries the CLI exit code for its category."""


class MibwardenError(Exception):
    exit_code = 5


class ConfigError(MibwardenError, ValueError):
    exit_code = 2


class DataFormatError(MibwardenError, ValueError):
    exit_code = 3

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaMismatchError(MibwardenError, ValueError):
    exit_code = 4
