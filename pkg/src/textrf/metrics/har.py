"""Classification accuracy."""

from __future__ import annotations

import numpy as np

from textrf.errors import InvalidArgument


def accuracy(pred, truth) -> float:
    """Fraction of positions where pred equals truth."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise InvalidArgument(f"length mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise InvalidArgument("accuracy of an empty prediction list is undefined")
    return float(np.mean(pred == truth))
