"""Command-line harness: dataset generation, embedding caches, W vs. W+T runs,
prompt-strategy ablations and report re-rendering.

Every command is deterministic for a fixed config and seed list; identical
invocations produce byte-identical CSV reports.  The exit code is 0 on
success; failures print one machine-readable JSON line to stderr and exit 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from textrf.experiment import ExperimentConfig, run_ablation, run_experiment


def load_config(path: str | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    raw = json.loads(Path(path).read_text())
    return ExperimentConfig.from_dict(raw)


def apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    d = cfg.to_dict()
    if getattr(args, "seed", None):
        d["seeds"] = list(args.seed)
    if getattr(args, "strategy", None):
        d["strategy"] = args.strategy
    if getattr(args, "text_weight", None) is not None:
        d["text_weight"] = args.text_weight
    if getattr(args, "pooling", None):
        d["pooling"] = args.pooling
    if getattr(args, "task", None):
        d["task"] = args.task
    if getattr(args, "modality", None):
        d["modality"] = args.modality
    return ExperimentConfig.from_dict(d)


def cmd_gen(args) -> int:
    from textrf.datasets import save_har_dataset, save_tal_dataset
    from textrf.experiment import build_har_datasets, build_tal_datasets

    cfg = apply_overrides(load_config(args.config), args)
    out = Path(args.out)
    if cfg.task == "har":
        train_ds, test_ds = build_har_datasets(cfg)
        save_har_dataset(train_ds, test_ds, out)
        counts = (len(train_ds), len(test_ds))
    else:
        train_ds, test_ds = build_tal_datasets(cfg)
        save_tal_dataset(train_ds, test_ds, out)
        counts = (len(train_ds), len(test_ds))
    (out / "gen_config.json").write_text(json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n")
    print(f"wrote {cfg.task} dataset to {out} (train={counts[0]}, test={counts[1]})")
    return 0


def cmd_embed(args) -> int:
    from textrf.text import PromptStrategy, pseudo_cache, save_embedding_cache

    labels = [
        line.strip()
        for line in Path(args.labels).read_text().splitlines()
        if line.strip()
    ]
    cache = pseudo_cache(labels, args.dim, PromptStrategy(args.strategy))
    save_embedding_cache(cache, args.out)
    print(f"wrote pseudo embedding cache for {len(labels)} labels to {args.out}")
    return 0


def cmd_run(args) -> int:
    cfg = apply_overrides(load_config(args.config), args)
    result = run_experiment(cfg, args.data, args.out)
    sys.stdout.write(result["csv"])
    print(f"report written to {Path(args.out) / 'report.csv'}")
    return 0


def cmd_ablate(args) -> int:
    cfg = apply_overrides(load_config(args.config), args)
    strategies = args.strategies.split(",") if args.strategies else None
    result = run_ablation(cfg, args.data, args.out, strategies=strategies)
    sys.stdout.write(result["csv"])
    if result["failures"]:
        print(f"{len(result['failures'])} grid cell(s) failed; see failures.json", file=sys.stderr)
    print(f"ablation written to {Path(args.out) / 'ablation.csv'}")
    return 0


def cmd_report(args) -> int:
    from textrf.metrics.report import csv_to_table

    sys.stdout.write(csv_to_table(Path(args.csv).read_text()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="textrf",
        description="Text-augmented wireless sensing experiments on synthetic signals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_data=False):
        p.add_argument("--config", help="experiment config JSON")
        p.add_argument("--seed", type=int, action="append", help="training seed (repeatable)")
        p.add_argument("--strategy", choices=["TLE", "TCE", "TDE"])
        p.add_argument("--text-weight", dest="text_weight", type=float)
        p.add_argument("--pooling", choices=["mean", "cross_attention"])
        p.add_argument("--task", choices=["har", "tal"])
        p.add_argument("--modality", choices=["csi", "fmcw", "rfid"])
        if with_data:
            p.add_argument("--data", required=True, help="dataset directory from `gen`")
        p.add_argument("--out", required=True, help="output directory")

    p_gen = sub.add_parser("gen", help="generate a labeled synthetic dataset")
    add_common(p_gen)
    p_gen.set_defaults(func=cmd_gen)

    p_embed = sub.add_parser("embed", help="write a pseudo-embedding cache JSON")
    p_embed.add_argument("--labels", required=True, help="file with one label per line")
    p_embed.add_argument("--strategy", default="TCE", choices=["TLE", "TCE", "TDE"])
    p_embed.add_argument("--dim", type=int, default=16)
    p_embed.add_argument("--out", required=True)
    p_embed.set_defaults(func=cmd_embed)

    p_run = sub.add_parser("run", help="train and evaluate W vs. W+T")
    add_common(p_run, with_data=True)
    p_run.set_defaults(func=cmd_run)

    p_ablate = sub.add_parser("ablate", help="strategy grid of runs")
    add_common(p_ablate, with_data=True)
    p_ablate.add_argument("--strategies", help="comma-separated subset, e.g. TLE,TCE")
    p_ablate.set_defaults(func=cmd_ablate)

    p_report = sub.add_parser("report", help="re-render a report CSV as a text table")
    p_report.add_argument("--csv", required=True)
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single choke point for the error contract
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
