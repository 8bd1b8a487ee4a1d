"""Temporal action localization metrics.

tIoU uses the enclosing-span union T_U = max(ends) - min(starts); AP@t is the
recall-style fraction of ground-truth actions covered at tIoU >= t.  There is
deliberately no false-positive penalty: detections that never claim a ground
truth simply do not count, and duplicate detections beyond the first match
are ignored.

The matching protocol (nowhere standardized for this metric) is fully pinned
down for reproducibility: detections are processed in descending score order
(ties: earlier input index first); each claims the still-unclaimed ground
truth of its class (when class-aware) with the highest strictly positive
tIoU, ties broken by earlier ground-truth start, then lower ground-truth
index.  Matching is one-to-one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from textrf.errors import InvalidArgument


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    class_id: int = 0

    def __post_init__(self) -> None:
        if not self.end > self.start:
            raise InvalidArgument(f"segment end {self.end} must exceed start {self.start}")
        if self.class_id < 0:
            raise InvalidArgument(f"class_id must be >= 0, got {self.class_id}")


@dataclass(frozen=True)
class Detection:
    segment: Segment
    score: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.score):
            raise InvalidArgument(f"score must be finite, got {self.score}")


@dataclass
class MatchResult:
    pairs: list[tuple[int, int, float]] = field(default_factory=list)  # (det, gt, tIoU)
    unmatched_detections: list[int] = field(default_factory=list)
    unmatched_ground_truths: list[int] = field(default_factory=list)


def tiou(a: Segment, b: Segment) -> float:
    """Temporal intersection over (enclosing-span) union, in [0, 1]."""
    inter = max(0.0, min(a.end, b.end) - max(a.start, b.start))
    union = max(a.end, b.end) - min(a.start, b.start)
    return inter / union


def match_detections(
    dets: Sequence[Detection], gts: Sequence[Segment], class_aware: bool = True
) -> MatchResult:
    """Greedy one-to-one matching by descending detection score."""
    order = sorted(range(len(dets)), key=lambda i: (-dets[i].score, i))
    claimed: set[int] = set()
    result = MatchResult()
    for di in order:
        det = dets[di]
        best: tuple[float, float, int] | None = None  # (-tIoU, gt start, gt index)
        for gi, gt in enumerate(gts):
            if gi in claimed:
                continue
            if class_aware and gt.class_id != det.segment.class_id:
                continue
            overlap = tiou(det.segment, gt)
            if overlap <= 0.0:
                continue
            key = (-overlap, gt.start, gi)
            if best is None or key < best:
                best = key
        if best is None:
            result.unmatched_detections.append(di)
        else:
            gi = best[2]
            claimed.add(gi)
            result.pairs.append((di, gi, -best[0]))
    result.unmatched_ground_truths = [gi for gi in range(len(gts)) if gi not in claimed]
    return result


def ap_at_t(
    dets: Sequence[Detection], gts: Sequence[Segment], t: float, class_aware: bool = True
) -> float:
    """Fraction of ground-truth actions whose matched tIoU reaches t."""
    if not gts:
        raise InvalidArgument("AP@t needs at least one ground-truth action")
    if not 0.0 < t <= 1.0:
        raise InvalidArgument(f"threshold must be in (0, 1], got {t}")
    match = match_detections(dets, gts, class_aware=class_aware)
    hits = sum(1 for _, _, overlap in match.pairs if overlap >= t)
    return hits / len(gts)


DEFAULT_THRESHOLDS = (0.3, 0.4, 0.5, 0.6, 0.7)
FINE_THRESHOLDS = (0.5, 0.55, 0.6, 0.65, 0.7)


def mean_ap(
    dets: Sequence[Detection],
    gts: Sequence[Segment],
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    class_aware: bool = True,
) -> float:
    """Arithmetic mean of AP@t over the threshold list."""
    if not thresholds:
        raise InvalidArgument("threshold list must be non-empty")
    values = [ap_at_t(dets, gts, t, class_aware=class_aware) for t in thresholds]
    return sum(values) / len(values)


def segments_to_json(items: Sequence[Segment] | Sequence[Detection]) -> list[dict]:
    """Serialize segments or detections as {start, end, class, score?} dicts."""
    out = []
    for item in items:
        if isinstance(item, Detection):
            seg, score = item.segment, item.score
        else:
            seg, score = item, None
        entry = {"start": seg.start, "end": seg.end, "class": seg.class_id}
        if score is not None:
            entry["score"] = score
        out.append(entry)
    return out


def segments_from_json(items: Sequence[dict]) -> list[Segment] | list[Detection]:
    """Inverse of segments_to_json; entries with a score load as Detections."""
    out: list = []
    for entry in items:
        seg = Segment(entry["start"], entry["end"], entry.get("class", 0))
        out.append(Detection(seg, entry["score"]) if "score" in entry else seg)
    return out
