"""Multi-head self-attention refinement of label-text tokens.

Per head h: Attention(Q, K, V) = softmax(Q K^T / sqrt(d_k)) V with
Q = X W_q[h], K = X W_k[h], V = X W_v[h]; head outputs are concatenated,
mapped by the output projection, and a residual connection is added.  The
combined representation prepends the mean-pooled attended tokens as one
summary token to the initial tokens, giving L+1 tokens per label.

There is no positional encoding: token order inside a label's description
list is not meaningful, and the map stays permutation-equivariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from textrf.errors import InvalidArgument
from textrf.nn.tensor import Tensor, as_tensor, concat, uniform_init

ROLES = ("initial", "attended", "combined")


@dataclass
class TokenMatrix:
    """(labels, tokens, channels) real array plus its pipeline role."""

    data: np.ndarray
    role: str = "initial"

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 3:
            raise InvalidArgument(f"token matrix must be 3-d, got shape {self.data.shape}")
        if self.role not in ROLES:
            raise InvalidArgument(f"role must be one of {ROLES}, got {self.role!r}")
        if not np.all(np.isfinite(self.data)):
            raise InvalidArgument("token matrix contains non-finite values")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape


@dataclass
class MhsaWeights:
    """Per-head projection matrices and the shared output projection.

    w_q / w_k / w_v: lists of H matrices, each (C, d_k); w_o: (H*d_k, C).
    """

    num_heads: int
    head_dim: int
    w_q: list[Tensor]
    w_k: list[Tensor]
    w_v: list[Tensor]
    w_o: Tensor

    def __post_init__(self) -> None:
        h, dk = self.num_heads, self.head_dim
        for name, group in (("w_q", self.w_q), ("w_k", self.w_k), ("w_v", self.w_v)):
            if len(group) != h:
                raise InvalidArgument(f"{name}: expected {h} head matrices, got {len(group)}")
            for m in group:
                if m.shape != (self.model_dim, dk):
                    raise InvalidArgument(
                        f"{name}: head matrix shape {m.shape} != ({self.model_dim}, {dk})"
                    )
        if self.w_o.shape != (h * dk, self.model_dim):
            raise InvalidArgument(
                f"w_o shape {self.w_o.shape} != ({h * dk}, {self.model_dim})"
            )

    @property
    def model_dim(self) -> int:
        return self.w_q[0].shape[0] if self.w_q else 0

    @classmethod
    def init(
        cls, model_dim: int, num_heads: int = 4, head_dim: int | None = None, rng=None
    ) -> "MhsaWeights":
        if head_dim is None:
            if model_dim % num_heads:
                raise InvalidArgument(
                    f"model_dim {model_dim} not divisible by num_heads {num_heads}"
                )
            head_dim = model_dim // num_heads
        rng = rng if rng is not None else np.random.default_rng(0)
        mk = lambda tag, shape, fan: uniform_init(rng, shape, fan, tag)
        return cls(
            num_heads=num_heads,
            head_dim=head_dim,
            w_q=[mk(f"mhsa.q{h}", (model_dim, head_dim), model_dim) for h in range(num_heads)],
            w_k=[mk(f"mhsa.k{h}", (model_dim, head_dim), model_dim) for h in range(num_heads)],
            w_v=[mk(f"mhsa.v{h}", (model_dim, head_dim), model_dim) for h in range(num_heads)],
            w_o=mk("mhsa.o", (num_heads * head_dim, model_dim), num_heads * head_dim),
        )

    @classmethod
    def zeros(cls, model_dim: int, num_heads: int = 4, head_dim: int | None = None) -> "MhsaWeights":
        if head_dim is None:
            head_dim = model_dim // num_heads
        z = lambda shape: Tensor(np.zeros(shape), requires_grad=True)
        return cls(
            num_heads=num_heads,
            head_dim=head_dim,
            w_q=[z((model_dim, head_dim)) for _ in range(num_heads)],
            w_k=[z((model_dim, head_dim)) for _ in range(num_heads)],
            w_v=[z((model_dim, head_dim)) for _ in range(num_heads)],
            w_o=z((num_heads * head_dim, model_dim)),
        )

    def parameters(self) -> list[Tensor]:
        return [*self.w_q, *self.w_k, *self.w_v, self.w_o]


def mhsa_tensor(x: Tensor, weights: MhsaWeights, collect_attention: list | None = None) -> Tensor:
    """Attention + residual on a (B, L, C) tensor; differentiable end to end."""
    x = as_tensor(x)
    scale = 1.0 / math.sqrt(weights.head_dim)
    heads = []
    for h in range(weights.num_heads):
        q = x @ weights.w_q[h]  # (B, L, d_k)
        k = x @ weights.w_k[h]
        v = x @ weights.w_v[h]
        logits = (q @ k.swapaxes(-1, -2)) * scale  # (B, L, L)
        attn = logits.softmax(axis=-1)
        if collect_attention is not None:
            collect_attention.append(attn.data.copy())
        heads.append(attn @ v)
    merged = concat(heads, axis=-1)  # (B, L, H*d_k)
    return merged @ weights.w_o + x


def mhsa_forward(
    t_init: TokenMatrix, weights: MhsaWeights, return_attention: bool = False
):
    """Refine initial tokens; returns an attended TokenMatrix of the same shape."""
    if t_init.role != "initial":
        raise InvalidArgument(f"expected role 'initial', got {t_init.role!r}")
    if t_init.shape[2] != weights.model_dim:
        raise InvalidArgument(
            f"token channel dim {t_init.shape[2]} != weight dim {weights.model_dim}"
        )
    attention: list | None = [] if return_attention else None
    out = mhsa_tensor(Tensor(t_init.data), weights, collect_attention=attention)
    result = TokenMatrix(out.data, role="attended")
    if return_attention:
        return result, np.stack(attention)  # (H, B, L, L)
    return result


def combine_tensor(t_att: Tensor, t_init: Tensor) -> Tensor:
    """Mean-pool the attended tokens to one summary token and prepend it."""
    summary = t_att.mean(axis=1, keepdims=True)  # (B, 1, C)
    return concat([summary, as_tensor(t_init)], axis=1)  # (B, L+1, C)


def combine(t_att: TokenMatrix, t_init: TokenMatrix) -> TokenMatrix:
    """Build the combined representation: L+1 tokens per label."""
    if t_att.role != "attended" or t_init.role != "initial":
        raise InvalidArgument(
            f"expected roles (attended, initial), got ({t_att.role!r}, {t_init.role!r})"
        )
    if t_att.shape != t_init.shape:
        raise InvalidArgument(f"shape mismatch: {t_att.shape} vs {t_init.shape}")
    out = combine_tensor(Tensor(t_att.data), Tensor(t_init.data))
    return TokenMatrix(out.data, role="combined")
