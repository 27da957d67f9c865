"""Feature sequences: the universal carrier for trajectories and embeddings.

A FeatureSequence is a T x D float64 matrix plus a modality tag. Video
streams hold one embedding row per frame; text streams one row per token.
Kernels work in float64 throughout; float32 appears only at file I/O.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonFiniteError,
    SequenceTooLongError,
    ValidationError,
)

MODALITIES = ("video", "text")

# Quadratic DP memory cap: alignment kernels refuse anything longer.
MAX_SEQ_LEN = 512


def as_float_matrix(values, what: str = "values") -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting NaN/Inf and empty axes."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"{what} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"{what} must be at least 1x1, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{what} contains NaN or Inf")
    return arr


@dataclass(frozen=True)
class FeatureSequence:
    """One modality's trajectory: T rows of D-dimensional features."""

    values: np.ndarray
    modality: str = "video"
    id: str = ""

    def __post_init__(self):
        arr = as_float_matrix(self.values, "FeatureSequence.values")
        object.__setattr__(self, "values", arr)
        if self.modality not in MODALITIES:
            raise ValidationError(
                f"unknown modality {self.modality!r}, expected one of {MODALITIES}"
            )

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def check_alignable(x: FeatureSequence, y: FeatureSequence) -> None:
    """Validate a pair before building a cost matrix between them."""
    if x.dim != y.dim:
        raise DimensionMismatchError(f"feature dims differ: {x.dim} vs {y.dim}")
    if x.length > MAX_SEQ_LEN or y.length > MAX_SEQ_LEN:
        raise SequenceTooLongError(
            f"sequence lengths {x.length}, {y.length} exceed cap {MAX_SEQ_LEN}"
        )
