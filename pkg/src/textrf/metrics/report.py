"""CSV emission and aligned-column text tables for metric reports.

Table shape mirrors the usual results layout: one row per method/modality,
one column per tIoU threshold plus an Avg column.  Floats are written with a
fixed format so identical runs produce byte-identical files.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Sequence

FLOAT_FORMAT = "{:.6f}"


def format_cell(value) -> str:
    if isinstance(value, float):
        return FLOAT_FORMAT.format(value)
    return str(value)


def write_csv(header: Sequence[str], rows: Sequence[Sequence], path: str | Path | None = None) -> str:
    buf = io.StringIO()
    buf.write(",".join(str(h) for h in header) + "\n")
    for row in rows:
        buf.write(",".join(format_cell(v) for v in row) + "\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def render_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    """Aligned-column text table: left-aligned first column, right-aligned numbers."""
    cells = [[str(h) for h in header]] + [[format_cell(v) for v in row] for row in rows]
    widths = [max(len(r[c]) for r in cells) for c in range(len(header))]
    lines = []
    for ri, row in enumerate(cells):
        parts = [row[0].ljust(widths[0])]
        parts += [row[c].rjust(widths[c]) for c in range(1, len(row))]
        lines.append("  ".join(parts).rstrip())
        if ri == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def csv_to_table(csv_text: str) -> str:
    """Re-render a CSV report as an aligned text table."""
    lines = [line for line in csv_text.strip().splitlines() if line]
    if not lines:
        return ""
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return render_table(header, rows)
