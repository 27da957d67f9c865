"""Time-warped IoU between a predicted and a ground-truth segmentation.

Both segmentations are strictly increasing event end-times with an
implicit start at 0. The two end-time series are aligned with hard DTW on
|x_i - t_j|; each ground-truth event then scores the intersection of its
aligned predicted intervals over their joint span, and the per-event
ratios are summed (raw) and averaged over ground-truth events
(normalized, in [0, 1]).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .align import check_path, dtw
from .errors import UnitMismatchError, ValidationError

UNITS = ("frames", "seconds")


@dataclass(frozen=True)
class Segmentation:
    """Strictly increasing event end-times over one trajectory."""

    end_times: tuple[float, ...]
    unit: str = "frames"
    id: str = ""
    trajectory_length: float | None = None

    def __post_init__(self):
        ends = tuple(float(v) for v in self.end_times)
        object.__setattr__(self, "end_times", ends)
        if len(ends) == 0:
            raise ValidationError("segmentation needs at least one end time")
        if self.unit not in UNITS:
            raise ValidationError(f"unknown unit {self.unit!r}, expected one of {UNITS}")
        if ends[0] <= 0 or not all(np.isfinite(ends)):
            raise ValidationError("end times must be finite and positive")
        if any(b <= a for a, b in zip(ends, ends[1:])):
            raise ValidationError(f"end times must be strictly increasing, got {ends}")
        if self.trajectory_length is not None and ends[-1] > self.trajectory_length:
            raise ValidationError(
                f"last end time {ends[-1]} exceeds trajectory length "
                f"{self.trajectory_length}"
            )

    def __len__(self) -> int:
        return len(self.end_times)

    def to_json(self) -> str:
        return json.dumps(
            {"id": self.id, "unit": self.unit, "end_times": list(self.end_times)}
        )

    @classmethod
    def from_json(cls, line: str) -> "Segmentation":
        obj = json.loads(line)
        return cls(
            end_times=tuple(obj["end_times"]),
            unit=obj.get("unit", "frames"),
            id=obj.get("id", ""),
        )


@dataclass(frozen=True)
class TwIouReport:
    """Per-trajectory TW-IoU breakdown."""

    raw_sum: float
    normalized: float
    per_gt_terms: tuple[tuple[int, float, float, float], ...]  # (gt idx, inter, union, ratio)
    alignment: tuple[tuple[int, int], ...] = field(repr=False, default=())


def tw_iou(pred: Segmentation, gt: Segmentation) -> TwIouReport:
    """Score pred against gt; 1.0 means every gt event perfectly covered."""
    if pred.unit != gt.unit:
        raise UnitMismatchError(f"units differ: {pred.unit} vs {gt.unit}")
    xs = np.asarray(pred.end_times)
    ts = np.asarray(gt.end_times)
    cost = np.abs(xs[:, None] - ts[None, :])
    _, path = dtw(cost)

    # Sequential grouping straight off the path: predicted event i (with
    # its own interval [x_{i-1}, x_i]) contributes once to every gt event
    # it is paired with.
    groups: list[list[int]] = [[] for _ in range(len(ts))]
    for i, j in path:
        groups[j].append(i)

    x_starts = np.concatenate(([0.0], xs[:-1]))
    t_starts = np.concatenate(([0.0], ts[:-1]))
    terms = []
    raw = 0.0
    for j, members in enumerate(groups):
        inter = 0.0
        hi = -np.inf
        lo = np.inf
        for i in members:
            inter += max(0.0, min(ts[j], xs[i]) - max(t_starts[j], x_starts[i]))
            hi = max(hi, max(ts[j], xs[i]))
            lo = min(lo, min(t_starts[j], x_starts[i]))
        union = hi - lo
        ratio = min(1.0, max(0.0, inter / union))
        raw += ratio
        terms.append((j, float(inter), float(union), float(ratio)))
    return TwIouReport(
        raw_sum=float(raw),
        normalized=float(raw / len(ts)),
        per_gt_terms=tuple(terms),
        alignment=tuple(path),
    )


def tw_iou_dataset(
    preds: list[Segmentation], gts: list[Segmentation]
) -> tuple[float, float, list[float]]:
    """Mean and population std of per-item normalized scores, on a 0-100 scale."""
    if len(preds) != len(gts):
        raise ValidationError(
            f"prediction/ground-truth count mismatch: {len(preds)} vs {len(gts)}"
        )
    if not preds:
        raise ValidationError("empty dataset")
    per_item = [tw_iou(p, g).normalized * 100.0 for p, g in zip(preds, gts)]
    arr = np.asarray(per_item)
    return float(arr.mean()), float(arr.std()), per_item
