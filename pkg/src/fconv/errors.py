"""Exception types raised by the convolution engine."""


class FconvError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FconvError, ValueError):
    """An argument lies outside the domain of an operation (bad index, length mismatch)."""


class PreconditionError(FconvError, ValueError):
    """A caller-side precondition failed, e.g. a decomposition that does not verify."""


class ValidationError(FconvError, ValueError):
    """A graph or tree decomposition violates one of its structural invariants."""


class SearchBudgetExceeded(FconvError, RuntimeError):
    """Raised by the rank search once it has examined more candidates than allowed.

    ``progress`` records how far the enumeration got before stopping.
    """

    def __init__(self, message, progress):
        super().__init__(message)
        self.progress = dict(progress)


class ParseError(FconvError, ValueError):
    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = source or "<input>"
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")
        self.reason = message
