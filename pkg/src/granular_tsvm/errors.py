"""Exception hierarchy shared by every module.

The CLI maps each family onto a stable exit code, so new error types should
subclass one of these rather than ``Exception`` directly.
"""


class GranularTSVMError(Exception):
    """Base class for all package errors."""


class ParseError(GranularTSVMError):
    """Malformed input file (ragged rows, non-numeric features, missing file)."""


class SchemaError(GranularTSVMError):
    """Input parses but violates the binary-label contract."""


class DegenerateDataError(GranularTSVMError):
    """A class is missing where both are required (split, fold, ball set)."""


class ConvergenceError(GranularTSVMError):
    """An iterative procedure ran out of iterations.

    ``partial`` carries whatever was computed before giving up.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SolverError(GranularTSVMError):
    """Numerical failure inside a QP or linear solve."""


class NotPositiveDefiniteError(SolverError):
    pass


class IndefiniteDiagonalError(SolverError):
    pass


class SolverConvergenceError(SolverError, ConvergenceError):
    """Box-QP sweep limit reached; ``partial`` is the best iterate."""

    def __init__(self, message, partial=None):
        ConvergenceError.__init__(self, message, partial)


class UnsupportedError(GranularTSVMError):
    """Operation not defined for this model mode (e.g. slacks on a kernel model)."""


class SingleClassError(SchemaError, DegenerateDataError):
    """A labeled file holds only one label value.

    It breaks the two-label schema and also leaves nothing to separate, so
    it is both kinds of error; the CLI reports it as degenerate data.
    """
