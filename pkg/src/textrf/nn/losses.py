"""Classification and localization losses for the HAR / TAL heads.

All losses are built on the autograd Tensor, so they can sit at the end of a
training graph; called with plain arrays they return plain floats.  Degenerate
inputs (zero probability at a true label, a batch with no positive positions)
are survivable: the value is clamped / zeroed and a module-level warning
counter is bumped instead of raising mid-epoch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from textrf.errors import InvalidArgument
from textrf.nn.tensor import Tensor, as_tensor, maximum, minimum

PROB_FLOOR = 1e-12


@dataclass
class LossWarnings:
    clamped_log_probs: int = 0
    batches_without_positives: int = 0

    def reset(self) -> None:
        self.clamped_log_probs = 0
        self.batches_without_positives = 0


_warnings = LossWarnings()


def loss_warnings() -> LossWarnings:
    return _warnings


def reset_loss_warnings() -> None:
    _warnings.reset()


def _maybe_float(value: Tensor, tensor_in: bool) -> Tensor | float:
    return value if tensor_in else value.item()


def cross_entropy_loss(probs, labels) -> Tensor | float:
    """Mean over the batch of -sum_c y_c * log(p_c).

    probs: (B, C) predicted distributions, rows summing to 1 within 1e-6.
    labels: (B, C) one-hot, or (B,) class indices.
    """
    tensor_in = isinstance(probs, Tensor)
    probs = as_tensor(probs)
    if probs.ndim != 2:
        raise InvalidArgument(f"probs must be (B, C), got shape {probs.shape}")
    batch, num_classes = probs.shape
    labels = np.asarray(labels)
    if labels.ndim == 1:
        onehot = np.zeros((batch, num_classes))
        onehot[np.arange(batch), labels.astype(int)] = 1.0
    else:
        onehot = labels.astype(np.float64)
    if onehot.shape != probs.shape:
        raise InvalidArgument(f"labels shape {onehot.shape} does not match probs {probs.shape}")
    row_sums = probs.data.sum(axis=1)
    if np.any(np.abs(row_sums - 1.0) > 1e-6):
        raise InvalidArgument("probability rows must sum to 1 within 1e-6")

    picked = (probs * onehot).sum(axis=1)
    if np.any(picked.data <= PROB_FLOOR):
        _warnings.clamped_log_probs += int(np.sum(picked.data <= PROB_FLOOR))
    loss = -(picked.clamp_min(PROB_FLOOR).log()).mean()
    return _maybe_float(loss, tensor_in)


def focal_loss(logits, targets, gamma: float = 2.0, alpha: float = 0.25) -> Tensor | float:
    """Mean over positions of -alpha * (1 - p_t)^gamma * log(p_t).

    logits: (N, C) per-position class scores; targets: (N,) class indices.
    p_t is the softmax probability of the target class.  gamma=0, alpha=1
    reduces to plain cross-entropy over the same positions.
    """
    if gamma < 0:
        raise InvalidArgument(f"gamma must be >= 0, got {gamma}")
    if not 0 < alpha <= 1:
        raise InvalidArgument(f"alpha must be in (0, 1], got {alpha}")
    tensor_in = isinstance(logits, Tensor)
    logits = as_tensor(logits)
    if logits.ndim != 2:
        raise InvalidArgument(f"logits must be (N, C), got shape {logits.shape}")
    n, num_classes = logits.shape
    targets = np.asarray(targets, dtype=int)
    if targets.shape != (n,):
        raise InvalidArgument(f"targets shape {targets.shape} does not match {n} positions")
    onehot = np.zeros((n, num_classes))
    onehot[np.arange(n), targets] = 1.0

    p = logits.softmax(axis=1)
    p_t = (p * onehot).sum(axis=1)
    if np.any(p_t.data <= PROB_FLOOR):
        _warnings.clamped_log_probs += int(np.sum(p_t.data <= PROB_FLOOR))
    p_t = p_t.clamp_min(PROB_FLOOR)
    modulator = (1.0 - p_t) ** gamma if gamma != 0 else 1.0
    loss = -(alpha * modulator * p_t.log()).mean()
    return _maybe_float(loss, tensor_in)


def localization_loss(pred_offsets, gt_offsets, coords=None) -> Tensor | float:
    """Mean (1 - tIoU) between decoded predicted and ground-truth segments.

    pred_offsets / gt_offsets: (P, 2) non-negative distances from each
    positive position to its segment start and end; coords: (P,) the
    positions themselves (tIoU is shift-invariant, so they default to 0).
    Returns 0 and counts a warning when P == 0.
    """
    tensor_in = isinstance(pred_offsets, Tensor)
    pred = as_tensor(pred_offsets)
    gt = np.asarray(gt_offsets, dtype=np.float64)
    if coords is None:
        coords = np.zeros(pred.shape[0] if pred.ndim == 2 else 0)
    coords = np.asarray(coords, dtype=np.float64)
    if pred.data.size == 0:
        _warnings.batches_without_positives += 1
        return _maybe_float(Tensor(0.0), tensor_in)
    if pred.ndim != 2 or pred.shape[1] != 2 or gt.shape != pred.shape:
        raise InvalidArgument(
            f"offsets must both be (P, 2), got {pred.shape} and {gt.shape}"
        )
    if np.any(pred.data < 0) or np.any(gt < 0):
        raise InvalidArgument("offsets must be >= 0")

    pred_start = coords - pred[:, 0]
    pred_end = coords + pred[:, 1]
    gt_start = coords - gt[:, 0]
    gt_end = coords + gt[:, 1]
    inter = maximum(minimum(pred_end, gt_end) - maximum(pred_start, gt_start), 0.0)
    union = maximum(pred_end, gt_end) - minimum(pred_start, gt_start)
    loss = (1.0 - inter / union).mean()
    return _maybe_float(loss, tensor_in)


def tal_total_loss(
    cls_losses: Sequence, loc_losses: Sequence, alpha_cls: float = 1.0, alpha_loc: float = 1000.0
) -> Tensor | float:
    """Pyramid loss: sum over levels of alpha_cls * L_cls_i + alpha_loc * L_loc_i."""
    if len(cls_losses) != len(loc_losses):
        raise InvalidArgument(
            f"level count mismatch: {len(cls_losses)} classification vs "
            f"{len(loc_losses)} localization losses"
        )
    if not cls_losses:
        raise InvalidArgument("need at least one pyramid level")
    tensor_in = any(isinstance(x, Tensor) for x in list(cls_losses) + list(loc_losses))
    total = Tensor(0.0)
    for c, l in zip(cls_losses, loc_losses):
        total = total + alpha_cls * as_tensor(c) + alpha_loc * as_tensor(l)
    return _maybe_float(total, tensor_in)
