"""Exception types shared across the toolkit.

Everything raised on bad inputs or violated contracts derives from
ValidationError so process boundaries (the CLI) can map it to exit code 2,
keeping plain I/O failures (OSError, exit code 1) separate.
"""


class ValidationError(Exception):
    """An input or argument violates a documented contract."""


class ParseError(ValidationError):
    """A record in an input file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyDatasetError(ValidationError):
    """An input file contained no records."""


class CapacityError(ValidationError):
    """A slice does not hold enough documents of some label."""


class StratificationError(ValidationError):
    """A label stratum is too small to split."""


class InsufficientDataError(ValidationError):
    """Fewer data points than the operation is defined for."""


class UndefinedMetricError(ValidationError):
    """The metric is mathematically undefined for these inputs."""


class UndefinedSimilarityError(ValidationError):
    """Cosine similarity is undefined (zero vector)."""


class UndefinedCorrelationError(ValidationError):
    """Correlation is undefined (zero variance)."""


class EmptyVocabularyError(ValidationError):
    """No terms survived tokenization of the training documents."""


class DegenerateTrainingError(ValidationError):
    """Training data does not contain at least two classes."""


class UnsupportedLabelError(ValidationError):
    """Label set outside what the operation supports (e.g. non-binary)."""


class DivergenceError(ValidationError):
    """Optimization produced a non-finite loss or parameters."""


class ShapeError(ValidationError):
    """Array dimensions do not match the model or each other."""


class CoverageError(ValidationError):
    """A prediction file does not cover the expected (pair, document) grid."""


class TagsetError(ValidationError):
    """A POS tag outside the declared tagset."""


class ToolkitWarning(UserWarning):
    """Non-fatal condition worth surfacing (collected by the CLI)."""


class MissingPivotError(ValidationError):
    """The pivot-year embedding table does not contain the aspect."""


class InsufficientSeriesError(ValidationError):
    """A similarity series is too short to rank."""
