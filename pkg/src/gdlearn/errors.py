"""Exception hierarchy shared by every stage of the pipeline."""


class GdlError(Exception):
    """Base class for all errors raised by gdlearn."""


class ParameterError(GdlError, ValueError):
    """An argument is outside its valid range."""


class FormatError(GdlError, ValueError):
    """A data file could not be parsed.

    ``line`` is the 1-based line number of the offending row, or ``None``
    when the problem is not tied to a single line (e.g. an empty file).
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StructuralError(GdlError, ValueError):
    """Inputs have inconsistent shapes or an unusable graph structure."""


class DisconnectedGraphError(StructuralError):
    """The neighbor graph has more than one connected component."""

    def __init__(self, message, components=None, unreachable=None):
        self.components = components
        self.unreachable = unreachable
        super().__init__(message)


class NumericalError(GdlError, ArithmeticError):
    """A computation produced non-finite values."""


class UndefinedMetricError(GdlError, ValueError):
    """A retrieval metric is undefined for the given input."""


class StageError(GdlError):
    """Wraps a failure inside one pipeline stage, keeping the stage name."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


class ConvergenceError(NumericalError):
    """An iterative solve stopped at its iteration cap."""
