"""Command-line entry point: embedcache --labels labels.txt --strategy TCE
--encoder hash:384 --out cache.json"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from embedcache.export import export_cache
from embedcache.prompts import STRATEGIES


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="embedcache",
        description="Render label prompts, encode them, and write an embedding-cache JSON.",
    )
    parser.add_argument("--labels", required=True, help="file with one label per line")
    parser.add_argument("--strategy", required=True, choices=list(STRATEGIES))
    parser.add_argument(
        "--encoder",
        required=True,
        help="encoder id: 'hash:<dim>' or a sentence-transformers model name",
    )
    parser.add_argument("--out", required=True, help="output cache path (JSON)")
    args = parser.parse_args(argv)

    try:
        labels = [
            line.strip() for line in Path(args.labels).read_text().splitlines() if line.strip()
        ]
        doc = export_cache(labels, args.strategy, args.encoder, args.out)
    except Exception as exc:  # noqa: BLE001 - single choke point for the error contract
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    print(
        f"wrote {len(doc['entries'])} labels x "
        f"{len(next(iter(doc['entries'].values())))} vectors (dim {doc['dim']}) to {args.out}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
