"""Exception hierarchy shared across the package.

The CLI maps these onto distinct exit codes, so error *kinds* matter more
than messages: file-format problems must stay distinguishable from
validation problems, and truncation from a bad magic number.
"""

from __future__ import annotations


class WarpsegError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(WarpsegError, ValueError):
    """Input violates a documented precondition."""


class DimensionMismatchError(ValidationError):
    """Two sequences (or a matrix and a sequence) disagree on a dimension."""


class NonFiniteError(ValidationError):
    """NaN or Inf found where only finite values are allowed."""


class SequenceTooLongError(ValidationError):
    """Sequence exceeds the quadratic-memory cap (MAX_SEQ_LEN steps)."""


class InvalidPathError(ValidationError):
    """Alignment path violates boundary, monotonicity, or continuity."""


class UnitMismatchError(ValidationError):
    """Segmentations use different time units."""


class FileFormatError(WarpsegError):
    """Base for binary/JSON file decoding problems."""


class BadMagicError(FileFormatError):
    """File does not start with the expected magic bytes."""


class BadVersionError(FileFormatError):
    """Magic matched but the format version is unsupported."""


class TruncatedFileError(FileFormatError):
    """File ended before the declared payload was complete."""


class TrainingDivergedError(WarpsegError):
    """Loss became non-finite during optimization."""


class BatchItemError(WarpsegError):
    """An item inside a batched call failed; carries the item index."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"batch item {index}: {cause}")
        self.index = index
        self.cause = cause
