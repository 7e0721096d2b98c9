"""Exception hierarchy shared across the package."""


class GraphShadowError(Exception):
    """Base class for all package errors."""


class InputError(GraphShadowError, ValueError):
    """Malformed or out-of-range input (bad edge id, offset, mismatched graphs)."""


class ConstructionError(GraphShadowError, RuntimeError):
    """A constructive step (cover, scaffold, connector, pieces) could not be completed.

    ``stage`` names the pipeline step that failed.
    """

    def __init__(self, message, stage=None):
        super().__init__(message if stage is None else f"[{stage}] {message}")
        self.stage = stage


class CertificateError(ConstructionError):
    """A certificate margin degenerated to zero or an invariant failed."""


class PreconditionError(InputError):
    """An operation was called outside its documented precondition."""


class FormatError(InputError):
    """System-description file could not be parsed or validated."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
