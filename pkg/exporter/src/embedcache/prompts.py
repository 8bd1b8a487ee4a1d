"""Prompt rendering for action labels.

Three strategies with increasing semantic richness:

- TLE: the raw label, unchanged (1 prompt per label)
- TCE: one sentence placing the action in a sensing context (1 prompt)
- TDE: three sentences describing movement, dynamics and setting (3 prompts)

Rendering is purely templated and deterministic; the sentences come from a
fixed in-repo template bank (recorded in the export metadata), not from a
generative model.
"""

from __future__ import annotations

PROMPTS_PER_LABEL = {"TLE": 1, "TCE": 1, "TDE": 3}
STRATEGIES = tuple(PROMPTS_PER_LABEL)

TCE_TEMPLATE = (
    'A person is performing the action "{label}" in an indoor room '
    "monitored by contactless wireless sensing devices."
)

TDE_TEMPLATES = (
    'The action "{label}" involves characteristic whole-body and limb movements '
    "that disturb nearby radio propagation paths.",
    'While performing "{label}", the person\'s posture, speed and rhythm evolve '
    "over a few seconds, producing a distinctive motion signature.",
    'A person repeatedly performs "{label}" at a fixed spot in a furnished indoor '
    "environment, with no other people moving nearby.",
)


def render_prompts(labels: list[str], strategy: str) -> dict[str, list[str]]:
    """Map each label to its prompt strings; rejects duplicates by name."""
    if strategy not in PROMPTS_PER_LABEL:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if not labels:
        raise ValueError("label list must be non-empty")
    seen = set()
    for label in labels:
        if label in seen:
            raise ValueError(f"duplicate label {label!r}")
        seen.add(label)

    rendered = {}
    for label in labels:
        if strategy == "TLE":
            rendered[label] = [label]
        elif strategy == "TCE":
            rendered[label] = [TCE_TEMPLATE.format(label=label)]
        else:
            rendered[label] = [t.format(label=label) for t in TDE_TEMPLATES]
    return rendered
