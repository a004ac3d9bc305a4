"""Exception hierarchy.

Every error derives from ``ValueError`` (or ``RuntimeError`` for I/O-ish
failures) so callers that already guard scikit-learn style validation keep
working.
"""
from sklearn.exceptions import NotFittedError

__all__ = [
    "HubnessError",
    "NonFiniteError",
    "ZeroVectorError",
    "KTooLargeError",
    "MatrixTooLargeError",
    "ConservationViolatedError",
    "TooFewSamplesError",
    "DegenerateScaleError",
    "CandidateCountTooSmallError",
    "MissingFeaturesError",
    "UnsupportedMetricError",
    "MissingLabelsError",
    "DimensionMismatchError",
    "EmptyNeighborhoodError",
    "ClassTooSmallError",
    "ParseError",
    "ShapeMismatchError",
    "HashMismatchError",
    "NetworkUnavailableError",
    "FormatError",
    "NotFittedError",
]


class HubnessError(ValueError):
    """Base class for all errors raised by this package."""


class NonFiniteError(HubnessError):
    pass


class ZeroVectorError(HubnessError):
    pass


class KTooLargeError(HubnessError):
    pass


class MatrixTooLargeError(HubnessError):
    pass


class ConservationViolatedError(HubnessError):
    """k-occurrences do not sum to n * k, i.e. the graph is corrupted."""


class TooFewSamplesError(HubnessError):
    pass


class DegenerateScaleError(HubnessError):
    pass


class CandidateCountTooSmallError(HubnessError):
    pass


class MissingFeaturesError(HubnessError):
    pass


class UnsupportedMetricError(HubnessError):
    pass


class MissingLabelsError(HubnessError):
    pass


class DimensionMismatchError(HubnessError):
    pass


class EmptyNeighborhoodError(HubnessError):
    pass


class ClassTooSmallError(HubnessError):
    pass


class ShapeMismatchError(HubnessError):
    pass


class FormatError(HubnessError):
    """Binary file has a bad magic, version or truncated payload."""


class ParseError(HubnessError):
    """Text input could not be parsed; carries the 1-based location."""

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class HashMismatchError(RuntimeError):
    pass


class NetworkUnavailableError(RuntimeError):
    pass
