"""Domain errors with stable machine-readable codes.

Every error carries a ``code`` drawn from a closed set; the HTTP layer and
the CLI map codes to status codes and exit codes without string matching.
"""

from __future__ import annotations


class PreassessError(Exception):
    """Base class for all domain errors."""

    code = "DOMAIN_ERROR"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


# -- graph ------------------------------------------------------------------

class GraphParseError(PreassessError):
    code = "PARSE_ERROR"


class GraphValidationError(PreassessError):
    code = "VALIDATION_ERROR"


class UnknownNode(PreassessError):
    code = "UNKNOWN_NODE"


# -- probability ------------------------------------------------------------

class EmptyPerformance(PreassessError):
    code = "EMPTY_PERFORMANCE"


class LeafNotUnderParent(PreassessError):
    code = "LEAF_NOT_UNDER_PARENT"


class AllZeroWeights(PreassessError):
    code = "ALL_ZERO_WEIGHTS"


class ZeroDenominator(PreassessError):
    code = "ZERO_DENOMINATOR"


class UnknownLeaf(PreassessError):
    code = "UNKNOWN_LEAF"


# -- infotheory -------------------------------------------------------------

class EmptyCounts(PreassessError):
    code = "EMPTY_COUNTS"


class UnknownAttribute(PreassessError):
    code = "UNKNOWN_ATTRIBUTE"


class UnknownFeature(PreassessError):
    code = "UNKNOWN_FEATURE"


# -- dtree ------------------------------------------------------------------

class EmptyDataset(PreassessError):
    code = "EMPTY_DATASET"


class MissingAttribute(PreassessError):
    code = "MISSING_ATTRIBUTE"


class DegenerateSplit(PreassessError):
    code = "DEGENERATE_SPLIT"


# -- session ----------------------------------------------------------------

class NotAParent(PreassessError):
    code = "NOT_A_PARENT"


class SessionComplete(PreassessError):
    code = "SESSION_COMPLETE"


class SessionNotComplete(PreassessError):
    code = "SESSION_NOT_COMPLETE"


class SessionNotFound(PreassessError):
    code = "SESSION_NOT_FOUND"


class LeafNotQueued(PreassessError):
    code = "LEAF_NOT_QUEUED"


class AlreadyRecordedDifferently(PreassessError):
    code = "ALREADY_RECORDED_DIFFERENTLY"


class NoQuizDefined(PreassessError):
    code = "NO_QUIZ_DEFINED"


class AnswerCountMismatch(PreassessError):
    code = "ANSWER_COUNT_MISMATCH"


class IndexOutOfRange(PreassessError):
    code = "INDEX_OUT_OF_RANGE"


# -- store ------------------------------------------------------------------

class CsvParseError(PreassessError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, line: int, column: int = 0):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.column = column
        self.reason = message


class DuplicateRow(PreassessError):
    code = "DUPLICATE_ROW"


class UnknownLabel(PreassessError):
    code = "UNKNOWN_LABEL"


class SequenceGap(PreassessError):
    code = "SEQUENCE_GAP"


class StorageFailure(PreassessError):
    code = "STORAGE_FAILURE"


class CorruptLog(PreassessError):
    code = "CORRUPT_LOG"


class FixtureMissing(PreassessError):
    code = "FIXTURE_MISSING"
