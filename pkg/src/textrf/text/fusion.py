"""Weighted fusion of wireless features with the combined text tokens.

The signal keeps a fixed weight of 0.9 and the text side 0.1.  Two pooling
modes reduce the token stack to one vector per sample:

- "mean": a constant semantic prior, the arithmetic mean of all tokens;
- "cross_attention" (default): the wireless feature vector acts as the
  query over the tokens, so the pooled text vector is sample-dependent and
  can carry class information at inference time.

Tokens live in the text channel dim C; a linear projection maps the pooled
vector to the wireless feature dim before the weighted sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from textrf.errors import InvalidArgument
from textrf.nn.tensor import Tensor, as_tensor

POOLING_MODES = ("mean", "cross_attention")


@dataclass
class FusionConfig:
    w_signal: float = 0.9
    w_text: float = 0.1
    pooling: str = "cross_attention"
    projection: np.ndarray | Tensor | None = None  # (signal_dim, text_dim); None = identity

    def __post_init__(self) -> None:
        if self.w_signal < 0 or self.w_text < 0:
            raise InvalidArgument("fusion weights must be >= 0")
        if abs(self.w_signal + self.w_text - 1.0) > 1e-9:
            raise InvalidArgument(
                f"fusion weights must sum to 1, got {self.w_signal} + {self.w_text}"
            )
        if self.pooling not in POOLING_MODES:
            raise InvalidArgument(f"pooling must be one of {POOLING_MODES}")

    @staticmethod
    def init_projection(signal_dim: int, text_dim: int, rng) -> Tensor:
        bound = 1.0 / math.sqrt(text_dim)
        return Tensor(
            rng.uniform(-bound, bound, size=(signal_dim, text_dim)),
            requires_grad=True,
            name="fusion.projection",
        )


def fuse_tensor(wireless: Tensor, tokens: Tensor, cfg: FusionConfig) -> Tensor:
    """wireless (B, D), tokens (N_tokens, C) -> fused (B, D), differentiable."""
    wireless = as_tensor(wireless)
    tokens = as_tensor(tokens)
    batch, signal_dim = wireless.shape
    n_tokens, text_dim = tokens.shape

    if cfg.projection is None:
        if text_dim != signal_dim:
            raise InvalidArgument(
                f"no projection given but text dim {text_dim} != signal dim {signal_dim}"
            )
        projection = None
    else:
        projection = as_tensor(cfg.projection)
        if projection.shape != (signal_dim, text_dim):
            raise InvalidArgument(
                f"projection shape {projection.shape} != ({signal_dim}, {text_dim})"
            )

    def project(vec: Tensor) -> Tensor:  # (..., C) -> (..., D)
        return vec if projection is None else vec @ projection.swapaxes(0, 1)

    if cfg.pooling == "mean":
        pooled = tokens.mean(axis=0).reshape(1, text_dim)  # (1, C)
        text_part = project(pooled)  # (1, D), broadcast over the batch
    else:
        keys = project(tokens)  # (N, D)
        logits = (wireless @ keys.swapaxes(0, 1)) * (1.0 / math.sqrt(signal_dim))  # (B, N)
        attn = logits.softmax(axis=1)
        text_part = project(attn @ tokens)  # (B, D)
    return cfg.w_signal * wireless + cfg.w_text * text_part


def fuse(wireless: np.ndarray, combined, cfg: FusionConfig) -> np.ndarray:
    """Fuse wireless feature vector(s) with a combined TokenMatrix.

    wireless: (D,) or (B, D); the token matrix is flattened over labels and
    tokens before pooling.  Output has the same shape as the input.
    """
    from textrf.text.attention import TokenMatrix

    if isinstance(combined, TokenMatrix):
        token_array = combined.data.reshape(-1, combined.shape[2])
    else:
        token_array = np.asarray(combined, dtype=np.float64)
        if token_array.ndim == 3:
            token_array = token_array.reshape(-1, token_array.shape[2])
        if token_array.ndim != 2:
            raise InvalidArgument("combined tokens must be 2-d or 3-d")

    w = np.asarray(wireless, dtype=np.float64)
    single = w.ndim == 1
    if single:
        w = w[None, :]
    out = fuse_tensor(Tensor(w), Tensor(token_array), cfg).data
    return out[0] if single else out
