"""Exception hierarchy shared across the toolkit."""


class QnrError(Exception):
    """Base class for every error raised by qnrbench."""


class InvalidArgumentError(QnrError, ValueError):
    pass


class UnsupportedPrimeError(QnrError, ValueError):
    """The prime is valid but outside the benchmark's supported class."""


class WidthLimitError(QnrError, ValueError):
    pass


class UnsupportedGateError(QnrError, ValueError):
    pass


class CircuitValidationError(QnrError, ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class SearchBudgetExceeded(QnrError, RuntimeError):
    """Permutation search ran out of nodes before finding a circuit."""


class QasmError(QnrError, ValueError):
    """Structured QASM front-end error carrying a source position."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)
