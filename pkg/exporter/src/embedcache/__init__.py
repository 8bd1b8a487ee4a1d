"""Offline label-prompt embedding exporter.

Renders one of three prompt strategies per label (raw label, one enriched
sentence, or three detailed descriptions), encodes the prompts with a text
encoder, and writes a schema-exact JSON cache consumed by the sensing-side
training code.  The JSON file is the only contract between the two sides.
"""

from embedcache.encoders import EncoderLoadError, get_encoder
from embedcache.export import export_cache, validate_cache_document
from embedcache.prompts import STRATEGIES, render_prompts

__version__ = "0.1.0"

__all__ = [
    "STRATEGIES",
    "render_prompts",
    "get_encoder",
    "EncoderLoadError",
    "export_cache",
    "validate_cache_document",
]
