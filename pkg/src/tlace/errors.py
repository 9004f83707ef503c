"""Exception types shared across the package."""


class TlaceError(Exception):
    """Base class for every error raised by this package."""


class FormulaSyntaxError(TlaceError):
    """Malformed formula text. Carries the 1-based line/column of the offence."""

    def __init__(self, message, line, column):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnknownOperatorError(TlaceError):
    """An operator that exists in another dialect was used (e.g. EX under arctl)."""


class UnsupportedOperatorError(TlaceError):
    """Group/distributed/common knowledge and other unimplemented operators."""


class ModelFormatError(TlaceError):
    """A model or multi-agent-system document violates the file format."""


class UnknownAtomError(TlaceError):
    """A formula mentions an atomic proposition the model does not declare."""


class SchemaError(TlaceError):
    """A TLACE document violates the XML/JSON schema. Carries an element path."""

    def __init__(self, message, path="tlace"):
        super().__init__(f"{path}: {message}")
        self.path = path


class PreconditionError(TlaceError):
    """Defensive check failed; signals a bug in the caller or the checker."""
