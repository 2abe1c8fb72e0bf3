"""Overlap scores between a predicted and a reference mask."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["MetricPair", "evaluate"]


@dataclass(frozen=True)
class MetricPair:
    dsc: float
    js: float


def evaluate(pred, truth):
    """Dice and Jaccard coefficients of two boolean masks.

    Two empty masks agree perfectly (1.0); exactly one empty mask scores 0.
    """
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if pred.shape != truth.shape:
        raise ValueError(f"mask shape mismatch {pred.shape} vs {truth.shape}")
    inter = int(np.count_nonzero(pred & truth))
    union = int(np.count_nonzero(pred | truth))
    total = int(np.count_nonzero(pred)) + int(np.count_nonzero(truth))
    if total == 0:
        return MetricPair(1.0, 1.0)
    return MetricPair(2.0 * inter / total, inter / union)
