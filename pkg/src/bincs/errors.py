"""Exception types shared across the toolkit.

Every error raised by bincs derives from :class:`BincsError`, so callers
(in particular the benchmark harness, which counts solver failures as
unsuccessful trials rather than aborting) can catch one base class.
"""


class BincsError(Exception):
    """Base class for all bincs errors."""


class IndexOutOfRange(BincsError):
    """A row or column index falls outside the declared matrix shape."""


class DuplicateEdge(BincsError):
    """A column support lists the same row index twice."""


class IrregularColumn(BincsError):
    """A column support does not have exactly the declared degree."""


class DuplicateColumn(BincsError):
    """Two columns have identical supports."""


class DuplicateIndexInT(BincsError):
    """A Gram-submatrix index subset contains a repeated column index."""


class ParseError(BincsError):
    """A matrix file is malformed.  Carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class InconsistentHeader(BincsError):
    """Matrix file contents contradict the declared header values."""


class InfeasibleDegree(BincsError):
    """Requested column degree is outside the constructible range."""


class ConstructionFailed(BincsError):
    """No matrix meeting the girth target was found within the retry budget."""


class InfeasibleParameters(BincsError):
    """(M, N, d) cannot be realized by a matrix of the assumed class."""


class SideConditionViolated(BincsError):
    """Inputs violate a side condition required by a closed-form expression."""


class ParameterOutOfBranch(BincsError):
    """Inputs fit neither validity branch of a two-branch formula."""


class InvalidRange(BincsError):
    """A scalar argument lies outside its admissible interval."""


class NotSymmetric(BincsError):
    """The eigensolver was handed a matrix that is not symmetric."""


class KTooLarge(BincsError):
    """A subset size or sparsity level exceeds what the matrix supports."""


class RankDeficient(BincsError):
    """A least-squares column block is (numerically) rank deficient."""
