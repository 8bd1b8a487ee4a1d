from textrf.metrics.har import accuracy
from textrf.metrics.tal import (
    DEFAULT_THRESHOLDS,
    FINE_THRESHOLDS,
    Detection,
    MatchResult,
    Segment,
    ap_at_t,
    match_detections,
    mean_ap,
    segments_from_json,
    segments_to_json,
    tiou,
)
from textrf.metrics.report import csv_to_table, render_table, write_csv

__all__ = [
    "accuracy",
    "Segment",
    "Detection",
    "MatchResult",
    "tiou",
    "match_detections",
    "ap_at_t",
    "mean_ap",
    "segments_to_json",
    "segments_from_json",
    "DEFAULT_THRESHOLDS",
    "FINE_THRESHOLDS",
    "write_csv",
    "render_table",
    "csv_to_table",
]
