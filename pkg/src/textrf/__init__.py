"""Text-augmented wireless sensing toolkit.

Synthesizes CSI / RFID / FMCW signals from first-principles channel models,
refines precomputed label-text embeddings with multi-head self-attention,
fuses text and signal features with a fixed 0.9/0.1 weighting, trains small
HAR / TAL heads on a minimal reverse-mode gradient engine, and evaluates
with recall-style AP over temporal IoU thresholds.
"""

from textrf.errors import CacheFormatError, DomainError, InvalidArgument

__version__ = "0.1.0"

__all__ = ["InvalidArgument", "DomainError", "CacheFormatError", "__version__"]
