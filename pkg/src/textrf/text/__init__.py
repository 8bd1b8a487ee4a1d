from textrf.text.attention import MhsaWeights, TokenMatrix, combine, mhsa_forward
from textrf.text.cache import (
    EmbeddingCache,
    PromptStrategy,
    load_embedding_cache,
    save_embedding_cache,
    tokens_from_cache,
)
from textrf.text.fusion import FusionConfig, fuse
from textrf.text.pseudo import pseudo_cache, pseudo_embed

__all__ = [
    "PromptStrategy",
    "EmbeddingCache",
    "load_embedding_cache",
    "save_embedding_cache",
    "tokens_from_cache",
    "pseudo_embed",
    "pseudo_cache",
    "TokenMatrix",
    "MhsaWeights",
    "mhsa_forward",
    "combine",
    "FusionConfig",
    "fuse",
]
