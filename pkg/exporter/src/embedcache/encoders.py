"""Text encoders behind a minimal encode(texts) -> (n, dim) interface.

Two backends:

- "hash:<dim>": a dependency-free deterministic encoder (SHA-256 counter
  stream per text).  It carries no semantics but is always available, which
  makes it the default for contract tests and offline pipelines.
- any other id is treated as a sentence-transformers model name and loaded
  locally; a missing package or model raises EncoderLoadError.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np


class EncoderLoadError(RuntimeError):
    """The requested encoder could not be constructed."""


class HashEncoder:
    """Deterministic pseudo-encoder: bytes of SHA-256(text || counter) mapped
    to doubles in [-1, 1)."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.dim = dim
        self.name = f"hash:{dim}"

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.empty((len(texts), self.dim))
        for i, text in enumerate(texts):
            values = []
            counter = 0
            while len(values) < self.dim:
                digest = hashlib.sha256(text.encode("utf-8") + struct.pack("<Q", counter)).digest()
                for off in range(0, 32, 8):
                    word = int.from_bytes(digest[off : off + 8], "little")
                    values.append((word >> 11) * 2.0**-53 * 2.0 - 1.0)
                counter += 1
            out[i] = values[: self.dim]
        return out


class SentenceTransformerEncoder:
    def __init__(self, model_name: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EncoderLoadError(
                f"sentence-transformers is not installed; cannot load {model_name!r}"
            ) from exc
        try:
            self._model = SentenceTransformer(model_name)
        except Exception as exc:
            raise EncoderLoadError(f"failed to load encoder {model_name!r}: {exc}") from exc
        self.name = model_name
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str]) -> np.ndarray:
        return np.asarray(self._model.encode(texts, convert_to_numpy=True), dtype=np.float64)


def get_encoder(encoder_id: str):
    if encoder_id.startswith("hash:"):
        return HashEncoder(int(encoder_id.split(":", 1)[1]))
    return SentenceTransformerEncoder(encoder_id)
