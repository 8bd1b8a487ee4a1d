"""Deterministic stand-in embeddings.

pseudo_embed hashes (strategy tag + "/" + label) with FNV-1a-64, streams
64-bit words from splitmix64 and maps each to a double in [-1, 1), then
L2-normalizes.  The output depends only on the inputs, not on platform,
numpy version or global RNG state, so tests and experiments that need a
text branch never have to load a pretrained encoder.
"""

from __future__ import annotations

import numpy as np

from textrf.errors import InvalidArgument
from textrf.text.cache import EmbeddingCache, PromptStrategy, STRATEGY_NUM_VECTORS

_MASK64 = (1 << 64) - 1
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def _splitmix64_stream(seed: int, count: int) -> list[int]:
    state = seed & _MASK64
    out = []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out.append(z ^ (z >> 31))
    return out


def pseudo_embed(label: str, dim: int, strategy: PromptStrategy) -> np.ndarray:
    """Unit-norm vector of length dim, fully determined by (label, dim, strategy)."""
    if not label:
        raise InvalidArgument("label must be non-empty")
    if dim < 1:
        raise InvalidArgument(f"dim must be >= 1, got {dim}")
    seed = fnv1a64(f"{PromptStrategy(strategy).value}/{label}".encode("utf-8"))
    words = _splitmix64_stream(seed, dim)
    # top 53 bits -> [0, 1), then shift to [-1, 1)
    vec = np.array([(w >> 11) * 2.0**-53 for w in words], dtype=np.float64)
    vec = 2.0 * vec - 1.0
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:  # astronomically unlikely, but keep the contract total
        vec[0] = 1.0
        norm = 1.0
    return vec / norm


def pseudo_cache(
    labels: list[str], dim: int, strategy: PromptStrategy, encoder_name: str = "pseudo"
) -> EmbeddingCache:
    """Cache with the strategy's vector count per label.

    Strategies with more than one description per label get vectors seeded by
    "label#<index>" for the extra slots.
    """
    strategy = PromptStrategy(strategy)
    num_vectors = STRATEGY_NUM_VECTORS[strategy]
    entries = {}
    for label in labels:
        if num_vectors == 1:
            entries[label] = [pseudo_embed(label, dim, strategy)]
        else:
            entries[label] = [
                pseudo_embed(f"{label}#{j}", dim, strategy) for j in range(num_vectors)
            ]
    return EmbeddingCache(encoder_name=encoder_name, strategy=strategy, dim=dim, entries=entries)
