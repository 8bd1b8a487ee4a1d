"""Cache export: render prompts, encode, L2-normalize, validate, write.

The output JSON layout is the exact contract with the sensing-side loader:

    {
      "encoder": "<encoder id>",
      "strategy": "TLE" | "TCE" | "TDE",
      "dim": <int>,
      "entries": { "<label>": [[<dim floats>], ...] }
    }

Vectors are L2-normalized so fusion magnitudes are comparable across
encoders.  A sidecar <out>.meta.json records the rendered prompts and the
template source for provenance; it is not part of the contract.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from embedcache.encoders import get_encoder
from embedcache.prompts import PROMPTS_PER_LABEL, render_prompts

CACHE_SCHEMA = {
    "type": "object",
    "required": ["encoder", "strategy", "dim", "entries"],
    "properties": {
        "encoder": {"type": "string"},
        "strategy": {"enum": ["TLE", "TCE", "TDE"]},
        "dim": {"type": "integer", "minimum": 1},
        "entries": {
            "type": "object",
            "minProperties": 1,
            "additionalProperties": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "number"},
                },
            },
        },
    },
}

_validator = Draft202012Validator(CACHE_SCHEMA)


def validate_cache_document(doc: dict) -> None:
    """Schema check plus the cross-entry invariants the schema cannot express."""
    errors = sorted(_validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        first = errors[0]
        raise ValueError(f"cache document invalid at {list(first.path)}: {first.message}")
    dim = doc["dim"]
    counts = set()
    for label, vectors in doc["entries"].items():
        counts.add(len(vectors))
        for j, vec in enumerate(vectors):
            if len(vec) != dim:
                raise ValueError(f"label {label!r}, vector {j}: length {len(vec)} != dim {dim}")
            if not all(np.isfinite(v) for v in vec):
                raise ValueError(f"label {label!r}, vector {j}: non-finite value")
    if len(counts) != 1:
        raise ValueError(f"labels carry differing vector counts: {sorted(counts)}")


def export_cache(labels: list[str], strategy: str, encoder_id: str, out_path: str | Path) -> dict:
    """Build, validate and write the cache; returns the written document."""
    prompts = render_prompts(labels, strategy)
    encoder = get_encoder(encoder_id)

    flat: list[str] = []
    for label in labels:
        flat.extend(prompts[label])
    vectors = encoder.encode(flat)
    if vectors.shape != (len(flat), encoder.dim):
        raise ValueError(
            f"encoder returned shape {vectors.shape}, expected ({len(flat)}, {encoder.dim})"
        )
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms == 0):
        raise ValueError("encoder produced a zero vector; cannot normalize")
    vectors = vectors / norms[:, None]

    per_label = PROMPTS_PER_LABEL[strategy]
    entries = {}
    for i, label in enumerate(labels):
        rows = vectors[i * per_label : (i + 1) * per_label]
        entries[label] = [[float(v) for v in row] for row in rows]

    doc = {
        "encoder": encoder.name,
        "strategy": strategy,
        "dim": int(encoder.dim),
        "entries": entries,
    }
    validate_cache_document(doc)

    out_path = Path(out_path)
    out_path.write_text(json.dumps(doc) + "\n")
    meta = {
        "prompts": prompts,
        "template_source": "fixed-bank",
        "prompts_per_label": per_label,
    }
    Path(str(out_path) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    return doc
