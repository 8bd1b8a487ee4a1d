"""Label-text embedding caches persisted as JSON.

File schema (the contract shared with the offline exporter):

    {
      "encoder": "<encoder id>",
      "strategy": "TLE" | "TCE" | "TDE",
      "dim": <int>,
      "entries": { "<label>": [[<dim floats>], ...] }
    }

Every label carries the same number of vectors (one per prompt rendering);
numbers are plain decimal doubles, so a write/read cycle is bit-exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from textrf.errors import CacheFormatError


class PromptStrategy(str, Enum):
    TLE = "TLE"  # raw label only
    TCE = "TCE"  # one context-enriched sentence
    TDE = "TDE"  # three detailed action descriptions


# prompt renderings per label for each strategy
STRATEGY_NUM_VECTORS = {
    PromptStrategy.TLE: 1,
    PromptStrategy.TCE: 1,
    PromptStrategy.TDE: 3,
}


@dataclass
class EmbeddingCache:
    encoder_name: str
    strategy: PromptStrategy
    dim: int
    entries: dict[str, list[np.ndarray]]

    def __post_init__(self) -> None:
        self.strategy = PromptStrategy(self.strategy)
        _validate_entries(self.dim, self.entries)

    @property
    def labels(self) -> list[str]:
        return list(self.entries.keys())

    @property
    def vectors_per_label(self) -> int:
        first = next(iter(self.entries.values()))
        return len(first)


def _validate_entries(dim: int, entries: dict[str, list[np.ndarray]]) -> None:
    if not entries:
        raise CacheFormatError("cache has no entries")
    num_vectors = None
    for label, vectors in entries.items():
        if num_vectors is None:
            num_vectors = len(vectors)
            if num_vectors < 1:
                raise CacheFormatError(f"label {label!r}: needs at least one vector")
        elif len(vectors) != num_vectors:
            raise CacheFormatError(
                f"label {label!r}: has {len(vectors)} vectors, others have {num_vectors}"
            )
        for j, vec in enumerate(vectors):
            if len(vec) != dim:
                raise CacheFormatError(
                    f"label {label!r}, vector {j}: length {len(vec)} != dim {dim}"
                )
            values = np.asarray(vec, dtype=np.float64)
            if not np.all(np.isfinite(values)):
                bad = int(np.flatnonzero(~np.isfinite(values))[0])
                raise CacheFormatError(
                    f"label {label!r}, vector {j}: non-finite value at index {bad}"
                )


def load_embedding_cache(path: str | Path) -> EmbeddingCache:
    """Load and validate a cache file; raises CacheFormatError naming the
    offending label/vector on any schema violation."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheFormatError(f"cannot parse {path}: {exc}") from exc
    for key in ("encoder", "strategy", "dim", "entries"):
        if key not in raw:
            raise CacheFormatError(f"{path}: missing required field {key!r}")
    try:
        strategy = PromptStrategy(raw["strategy"])
    except ValueError as exc:
        raise CacheFormatError(f"{path}: unknown strategy {raw['strategy']!r}") from exc
    dim = raw["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise CacheFormatError(f"{path}: dim must be a positive integer, got {dim!r}")
    if not isinstance(raw["entries"], dict) or not raw["entries"]:
        raise CacheFormatError(f"{path}: entries must be a non-empty object")
    entries: dict[str, list[np.ndarray]] = {}
    for label, vectors in raw["entries"].items():
        if not isinstance(vectors, list):
            raise CacheFormatError(f"label {label!r}: entry must be a list of vectors")
        parsed = []
        for j, vec in enumerate(vectors):
            if not isinstance(vec, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in vec
            ):
                raise CacheFormatError(f"label {label!r}, vector {j}: not a list of numbers")
            if any(isinstance(v, float) and not math.isfinite(v) for v in vec):
                raise CacheFormatError(f"label {label!r}, vector {j}: non-finite value")
            parsed.append(np.asarray(vec, dtype=np.float64))
        entries[label] = parsed
    return EmbeddingCache(encoder_name=raw["encoder"], strategy=strategy, dim=dim, entries=entries)


def save_embedding_cache(cache: EmbeddingCache, path: str | Path) -> None:
    doc = {
        "encoder": cache.encoder_name,
        "strategy": cache.strategy.value,
        "dim": cache.dim,
        "entries": {
            label: [[float(v) for v in vec] for vec in vectors]
            for label, vectors in cache.entries.items()
        },
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def tokens_from_cache(cache: EmbeddingCache, labels: list[str] | None = None) -> np.ndarray:
    """Stack cache entries into a (labels, vectors_per_label, dim) array.

    Row order follows `labels` when given (raising on unknown names), else the
    cache's own label order.
    """
    if labels is None:
        labels = cache.labels
    rows = []
    for label in labels:
        if label not in cache.entries:
            raise CacheFormatError(f"label {label!r} not present in cache")
        rows.append(np.stack(cache.entries[label]))
    return np.stack(rows)
