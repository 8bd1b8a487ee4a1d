"""W vs. W+T experiment orchestration.

The baseline model (W) sees only wireless features.  The fused model (W+T)
runs label embeddings through attention refinement, pools them against each
sample's wireless feature vector and mixes the projected text vector in with
a fixed 0.9/0.1 weighting; everything (head, attention, projection) trains
jointly.  Both models draw their shared submodule initializations and the
minibatch shuffling from the same seed streams, so setting the text weight
to zero makes W+T reproduce W bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from textrf.datasets import (
    HarDataset,
    TalDataset,
    extract_features,
    generate_har_dataset,
    generate_tal_dataset,
    standardize,
)
from textrf.errors import InvalidArgument
from textrf.metrics import DEFAULT_THRESHOLDS, Detection, Segment, match_detections, write_csv
from textrf.nn import HarHead, TalPyramid, TrainConfig, TrainResult, cross_entropy_loss, train
from textrf.nn.tensor import Tensor, as_tensor
from textrf.text import (
    FusionConfig,
    MhsaWeights,
    PromptStrategy,
    load_embedding_cache,
    pseudo_cache,
    tokens_from_cache,
)
from textrf.text.attention import combine_tensor, mhsa_tensor
from textrf.text.fusion import fuse_tensor

# seed-stream tags: one fixed constant per purpose
HEAD_STREAM = 0x48
TEXT_STREAM = 0x54


@dataclass
class TrainSettings:
    epochs: int = 120
    lr: float = 0.005
    batch_size: int = 20
    hidden: int = 32
    decay_every: int = 40


@dataclass
class TalSettings:
    levels: int = 3
    channels: int = 12
    train_recordings: int = 24
    test_recordings: int = 8
    length: int = 96
    epochs: int = 25
    lr: float = 0.01
    batch_size: int = 4
    score_threshold: float = 0.2
    thresholds: tuple = DEFAULT_THRESHOLDS


@dataclass
class ExperimentConfig:
    task: str = "har"
    modality: str = "csi"
    strategy: str = "TCE"
    embedding_source: str = "pseudo"  # "pseudo" or a cache-file path
    text_dim: int = 16
    text_weight: float = 0.1
    pooling: str = "cross_attention"
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    classes: list[str] = field(default_factory=lambda: ["walking", "waving", "falling"])
    train_total: int = 200
    test_total: int = 60
    coupling: float = 0.8
    data_seed: int = 0
    train: TrainSettings = field(default_factory=TrainSettings)
    tal: TalSettings = field(default_factory=TalSettings)

    def __post_init__(self) -> None:
        if self.task not in ("har", "tal"):
            raise InvalidArgument(f"task must be har or tal, got {self.task!r}")
        if not self.seeds:
            raise InvalidArgument("seeds must be non-empty")
        if not 0.0 <= self.text_weight <= 1.0:
            raise InvalidArgument(f"text_weight must be in [0, 1], got {self.text_weight}")
        PromptStrategy(self.strategy)  # validates
        if self.embedding_source != "pseudo" and not Path(self.embedding_source).exists():
            raise InvalidArgument(f"embedding cache file {self.embedding_source!r} does not exist")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        if "train" in raw and isinstance(raw["train"], dict):
            raw["train"] = TrainSettings(**raw["train"])
        if "tal" in raw and isinstance(raw["tal"], dict):
            tal = dict(raw["tal"])
            if "thresholds" in tal:
                tal["thresholds"] = tuple(tal["thresholds"])
            raw["tal"] = TalSettings(**tal)
        return cls(**raw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tal"]["thresholds"] = list(self.tal.thresholds)
        return d

    def resolve_cache(self):
        if self.embedding_source == "pseudo":
            return pseudo_cache(self.classes, self.text_dim, PromptStrategy(self.strategy))
        cache = load_embedding_cache(self.embedding_source)
        return cache

    def per_class_counts(self, total: int) -> list[int]:
        k = len(self.classes)
        return [total // k + (1 if i < total % k else 0) for i in range(k)]


# --- fused models -----------------------------------------------------------------


class FusedHarModel:
    """HAR head fed with 0.9 * wireless + 0.1 * attention-pooled text features.

    The head is initialized from the same seed stream as the baseline HarHead,
    so with text_weight=0 the two models are numerically indistinguishable.
    """

    def __init__(
        self,
        in_dim: int,
        hidden_dim: int,
        tokens_init: np.ndarray,  # (labels, L, C)
        seed: int,
        w_text: float = 0.1,
        pooling: str = "cross_attention",
        num_heads: int = 4,
    ):
        num_classes = tokens_init.shape[0]
        text_dim = tokens_init.shape[2]
        head_rng = np.random.default_rng(np.random.SeedSequence((seed, HEAD_STREAM)))
        text_rng = np.random.default_rng(np.random.SeedSequence((seed, TEXT_STREAM)))
        self.head = HarHead(in_dim, hidden_dim, num_classes, head_rng)
        heads = num_heads if text_dim % num_heads == 0 else 1
        self.mhsa = MhsaWeights.init(text_dim, num_heads=heads, rng=text_rng)
        self.projection = FusionConfig.init_projection(in_dim, text_dim, text_rng)
        self.tokens_init = np.asarray(tokens_init, dtype=np.float64)
        self.fusion = FusionConfig(
            w_signal=1.0 - w_text, w_text=w_text, pooling=pooling, projection=self.projection
        )

    def parameters(self):
        return self.head.parameters() + self.mhsa.parameters() + [self.projection]

    def _combined_tokens(self) -> Tensor:
        t_init = Tensor(self.tokens_init)
        t_att = mhsa_tensor(t_init, self.mhsa)
        combined = combine_tensor(t_att, t_init)  # (labels, L+1, C)
        flat = combined.reshape(-1, self.tokens_init.shape[2])
        return flat

    def fused_features(self, x) -> Tensor:
        return fuse_tensor(as_tensor(x), self._combined_tokens(), self.fusion)

    def logits(self, x) -> Tensor:
        return self.head.logits(self.fused_features(x))

    def predict(self, x) -> np.ndarray:
        return np.argmax(self.logits(x).data, axis=1)

    def loss(self, batch) -> Tensor:
        x, y = batch
        return cross_entropy_loss(self.logits(x).softmax(axis=1), y)

    def accuracy(self, x, y) -> float:
        return float(np.mean(self.predict(x) == np.asarray(y)))


class FusedTalModel:
    """TAL pyramid over per-timestep fused features."""

    def __init__(
        self,
        in_dim: int,
        channels: int,
        num_classes: int,
        num_levels: int,
        tokens_init: np.ndarray,
        seed: int,
        w_text: float = 0.1,
        pooling: str = "cross_attention",
    ):
        head_rng = np.random.default_rng(np.random.SeedSequence((seed, HEAD_STREAM)))
        text_rng = np.random.default_rng(np.random.SeedSequence((seed, TEXT_STREAM)))
        self.pyramid = TalPyramid(in_dim, channels, num_classes, num_levels, head_rng)
        text_dim = tokens_init.shape[2]
        heads = 4 if text_dim % 4 == 0 else 1
        self.mhsa = MhsaWeights.init(text_dim, num_heads=heads, rng=text_rng)
        self.projection = FusionConfig.init_projection(in_dim, text_dim, text_rng)
        self.tokens_init = np.asarray(tokens_init, dtype=np.float64)
        self.fusion = FusionConfig(
            w_signal=1.0 - w_text, w_text=w_text, pooling=pooling, projection=self.projection
        )

    def parameters(self):
        return self.pyramid.parameters() + self.mhsa.parameters() + [self.projection]

    def _combined_tokens(self) -> Tensor:
        t_init = Tensor(self.tokens_init)
        t_att = mhsa_tensor(t_init, self.mhsa)
        return combine_tensor(t_att, t_init).reshape(-1, self.tokens_init.shape[2])

    def fused_input(self, x) -> Tensor:
        """x: (B, CH, T) -> fused (B, CH, T), fusing each timestep's channel vector."""
        x = as_tensor(x)
        b, ch, t = x.shape
        flat = x.swapaxes(1, 2).reshape(b * t, ch)
        fused = fuse_tensor(flat, self._combined_tokens(), self.fusion)
        return fused.reshape(b, t, ch).swapaxes(1, 2)

    def forward(self, x):
        return self.pyramid.forward(self.fused_input(x))

    def loss(self, batch) -> Tensor:
        x, targets = batch
        fused = self.fused_input(x)
        return self.pyramid.loss((fused, targets))

    def assign_targets(self, segments, length):
        return self.pyramid.assign_targets(segments, length)

    def detect(self, x, score_threshold=0.2, time_scale=1.0):
        fused = self.fused_input(x)
        return self.pyramid.detect(fused, score_threshold=score_threshold, time_scale=time_scale)


# --- dataset resolution ------------------------------------------------------------


def mean_label_embeddings(cfg: ExperimentConfig) -> np.ndarray:
    cache = cfg.resolve_cache()
    tokens = tokens_from_cache(cache, cfg.classes)  # (K, L, C)
    return tokens.mean(axis=1)


def build_har_datasets(cfg: ExperimentConfig) -> tuple[HarDataset, HarDataset]:
    embeddings = mean_label_embeddings(cfg) if cfg.coupling > 0 else None
    counts_train = cfg.per_class_counts(cfg.train_total)
    counts_test = cfg.per_class_counts(cfg.test_total)
    full_train = generate_har_dataset(
        cfg.modality,
        cfg.classes,
        max(counts_train),
        seed=cfg.data_seed,
        embeddings=embeddings,
        coupling=cfg.coupling,
        direction_seed=cfg.data_seed,
    )
    full_test = generate_har_dataset(
        cfg.modality,
        cfg.classes,
        max(counts_test),
        seed=cfg.data_seed + 1,
        embeddings=embeddings,
        coupling=cfg.coupling,
        direction_seed=cfg.data_seed,
    )

    def trim(ds: HarDataset, counts: list[int]) -> HarDataset:
        keep = []
        for class_idx, count in enumerate(counts):
            keep.extend(np.flatnonzero(ds.labels == class_idx)[:count])
        keep = np.asarray(keep)
        return HarDataset(ds.sequences[keep], ds.labels[keep], ds.classes, ds.modality)

    return trim(full_train, counts_train), trim(full_test, counts_test)


def build_tal_datasets(cfg: ExperimentConfig) -> tuple[TalDataset, TalDataset]:
    embeddings = mean_label_embeddings(cfg) if cfg.coupling > 0 else None
    train = generate_tal_dataset(
        cfg.classes,
        cfg.tal.train_recordings,
        seed=cfg.data_seed,
        length=cfg.tal.length,
        embeddings=embeddings,
        coupling=cfg.coupling,
        direction_seed=cfg.data_seed,
    )
    test = generate_tal_dataset(
        cfg.classes,
        cfg.tal.test_recordings,
        seed=cfg.data_seed + 1,
        length=cfg.tal.length,
        embeddings=embeddings,
        coupling=cfg.coupling,
        direction_seed=cfg.data_seed,
    )
    return train, test


# --- single-seed runs ----------------------------------------------------------------


@dataclass
class HarSeedResult:
    seed: int
    accuracy_w: float
    accuracy_wt: float
    predictions_w: np.ndarray
    predictions_wt: np.ndarray
    curve_w: TrainResult | None = None
    curve_wt: TrainResult | None = None


def run_har_seed(
    cfg: ExperimentConfig, train_ds: HarDataset, test_ds: HarDataset, seed: int
) -> HarSeedResult:
    x_train, x_test = standardize(
        extract_features(train_ds.sequences), extract_features(test_ds.sequences)
    )
    y_train, y_test = train_ds.labels, test_ds.labels
    tokens = tokens_from_cache(cfg.resolve_cache(), cfg.classes)
    tc = TrainConfig(
        lr=cfg.train.lr,
        epochs=cfg.train.epochs,
        batch_size=cfg.train.batch_size,
        decay_every=cfg.train.decay_every,
    )

    head_rng = np.random.default_rng(np.random.SeedSequence((seed, HEAD_STREAM)))
    baseline = HarHead(x_train.shape[1], cfg.train.hidden, len(cfg.classes), head_rng)
    curve_w = train(
        baseline,
        (x_train, y_train),
        tc,
        seed=seed,
        epoch_metric=lambda m: m.accuracy(x_train, y_train),
    )

    fused = FusedHarModel(
        x_train.shape[1],
        cfg.train.hidden,
        tokens,
        seed=seed,
        w_text=cfg.text_weight,
        pooling=cfg.pooling,
    )
    curve_wt = train(
        fused,
        (x_train, y_train),
        tc,
        seed=seed,
        epoch_metric=lambda m: m.accuracy(x_train, y_train),
    )

    return HarSeedResult(
        seed=seed,
        accuracy_w=baseline.accuracy(x_test, y_test),
        accuracy_wt=fused.accuracy(x_test, y_test),
        predictions_w=baseline.predict(x_test),
        predictions_wt=fused.predict(x_test),
        curve_w=curve_w,
        curve_wt=curve_wt,
    )


def _eval_tal(model, recordings, segments_list, thresholds, score_threshold) -> list[float]:
    """Recall-style AP@t pooled over recordings (matching stays per recording)."""
    total_gts = 0
    hits = {t: 0 for t in thresholds}
    x = np.swapaxes(recordings, 1, 2)  # (N, CH, T)
    detections = model.detect(x, score_threshold=score_threshold)
    for rec_idx, segs in enumerate(segments_list):
        gts = [Segment(s, e, c) for s, e, c in segs]
        dets = [
            Detection(Segment(max(s, 0.0), e, c), score)
            for s, e, c, score in detections[rec_idx]
            if e > max(s, 0.0)
        ]
        total_gts += len(gts)
        match = match_detections(dets, gts)
        for t in thresholds:
            hits[t] += sum(1 for _, _, ov in match.pairs if ov >= t)
    if total_gts == 0:
        raise InvalidArgument("TAL evaluation needs at least one ground-truth segment")
    return [hits[t] / total_gts for t in thresholds]


@dataclass
class TalSeedResult:
    seed: int
    ap_w: list[float]
    ap_wt: list[float]
    curve_w: TrainResult | None = None
    curve_wt: TrainResult | None = None


def run_tal_seed(
    cfg: ExperimentConfig, train_ds: TalDataset, test_ds: TalDataset, seed: int
) -> TalSeedResult:
    ch = train_ds.recordings.shape[2]
    flat_train = train_ds.recordings.reshape(-1, ch)
    mean, std = flat_train.mean(axis=0), flat_train.std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    norm = lambda rec: (rec - mean) / std
    train_rec, test_rec = norm(train_ds.recordings), norm(test_ds.recordings)

    tokens = tokens_from_cache(cfg.resolve_cache(), cfg.classes)
    num_classes = len(cfg.classes)
    length = train_ds.recordings.shape[1]

    head_rng = np.random.default_rng(np.random.SeedSequence((seed, HEAD_STREAM)))
    baseline = TalPyramid(ch, cfg.tal.channels, num_classes, cfg.tal.levels, head_rng)
    fused = FusedTalModel(
        ch,
        cfg.tal.channels,
        num_classes,
        cfg.tal.levels,
        tokens,
        seed=seed,
        w_text=cfg.text_weight,
        pooling=cfg.pooling,
    )

    tc = TrainConfig(lr=cfg.tal.lr, epochs=cfg.tal.epochs, batch_size=cfg.tal.batch_size)
    x_train = np.swapaxes(train_rec, 1, 2)
    curves = []
    for model in (baseline, fused):
        targets = [model.assign_targets(segs, length) for segs in train_ds.segments]

        def make_batch(idx, _targets=targets):
            return x_train[idx], [_targets[i] for i in idx]

        curves.append(train(model, list(range(len(train_ds))), tc, seed=seed, make_batch=make_batch))

    thresholds = list(cfg.tal.thresholds)
    return TalSeedResult(
        seed=seed,
        ap_w=_eval_tal(baseline, test_rec, test_ds.segments, thresholds, cfg.tal.score_threshold),
        ap_wt=_eval_tal(fused, test_rec, test_ds.segments, thresholds, cfg.tal.score_threshold),
        curve_w=curves[0],
        curve_wt=curves[1],
    )


# --- reports -----------------------------------------------------------------------


def har_report(results: list[HarSeedResult]) -> tuple[list[str], list[list]]:
    acc_w = np.array([r.accuracy_w for r in results])
    acc_wt = np.array([r.accuracy_wt for r in results])
    header = ["model", "accuracy"]
    rows = [
        ["W", float(acc_w.mean())],
        ["W+T", float(acc_wt.mean())],
        ["Delta", float(acc_wt.mean() - acc_w.mean())],
        ["W_std", float(acc_w.std())],
        ["W+T_std", float(acc_wt.std())],
    ]
    return header, rows


def tal_report(results: list[TalSeedResult], thresholds) -> tuple[list[str], list[list]]:
    ap_w = np.array([r.ap_w for r in results])  # (seeds, thresholds)
    ap_wt = np.array([r.ap_wt for r in results])
    header = ["model"] + [f"{t:g}" for t in thresholds] + ["Avg"]
    mean_w, mean_wt = ap_w.mean(axis=0), ap_wt.mean(axis=0)
    std_w, std_wt = ap_w.std(axis=0), ap_wt.std(axis=0)

    def row(tag, values):
        return [tag, *[float(v) for v in values], float(np.mean(values))]

    rows = [
        row("W", mean_w),
        row("W+T", mean_wt),
        row("Delta", mean_wt - mean_w),
        row("W_std", std_w),
        row("W+T_std", std_wt),
    ]
    return header, rows


def run_experiment(cfg: ExperimentConfig, dataset_dir: str | Path, out_dir: str | Path) -> dict:
    """Train and evaluate W and W+T over all seeds; write report files."""
    from textrf.datasets import load_har_dataset, load_tal_dataset
    from textrf.metrics.report import render_table

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.task == "har":
        train_ds, test_ds = load_har_dataset(dataset_dir)
        results = [run_har_seed(cfg, train_ds, test_ds, s) for s in cfg.seeds]
        header, rows = har_report(results)
        per_seed = [
            {"seed": r.seed, "accuracy_w": r.accuracy_w, "accuracy_wt": r.accuracy_wt}
            for r in results
        ]
        primary_metric = float(np.mean([r.accuracy_wt for r in results]))
        baseline_metric = float(np.mean([r.accuracy_w for r in results]))
    else:
        train_ds, test_ds = load_tal_dataset(dataset_dir)
        results = [run_tal_seed(cfg, train_ds, test_ds, s) for s in cfg.seeds]
        header, rows = tal_report(results, cfg.tal.thresholds)
        per_seed = [{"seed": r.seed, "ap_w": r.ap_w, "ap_wt": r.ap_wt} for r in results]
        primary_metric = float(np.mean([np.mean(r.ap_wt) for r in results]))
        baseline_metric = float(np.mean([np.mean(r.ap_w) for r in results]))

    csv_text = write_csv(header, rows, out_dir / "report.csv")
    (out_dir / "report.txt").write_text(render_table(header, rows))
    for r in results:
        if r.curve_w is not None:
            (out_dir / f"curve_seed{r.seed}_w.csv").write_text(r.curve_w.to_csv())
        if r.curve_wt is not None:
            (out_dir / f"curve_seed{r.seed}_wt.csv").write_text(r.curve_wt.to_csv())
    (out_dir / "resolved_config.json").write_text(
        json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n"
    )
    (out_dir / "per_seed.json").write_text(json.dumps(per_seed, sort_keys=True, indent=2) + "\n")
    return {
        "header": header,
        "rows": rows,
        "csv": csv_text,
        "baseline": baseline_metric,
        "fused": primary_metric,
    }


def run_ablation(
    cfg: ExperimentConfig,
    dataset_dir: str | Path,
    out_dir: str | Path,
    strategies: list[str] | None = None,
    sources: list[str] | None = None,
) -> dict:
    """Strategy x embedding-source grid; every cell is a full run_experiment.

    The dataset is fixed across cells, so the baseline row is identical
    everywhere; per-cell failures are recorded and the rest of the grid
    still runs.
    """
    from textrf.metrics.report import render_table

    strategies = strategies or [s.value for s in PromptStrategy]
    sources = sources or [cfg.embedding_source]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    header = ["source", "strategy", "baseline", "fused", "delta"]
    rows: list[list] = []
    failures: dict[str, str] = {}
    for source in sources:
        for strategy in strategies:
            cell_dir = out_dir / f"{Path(str(source)).stem}_{strategy}"
            try:
                cell_cfg = ExperimentConfig.from_dict(
                    {**cfg.to_dict(), "strategy": strategy, "embedding_source": source}
                )
                result = run_experiment(cell_cfg, dataset_dir, cell_dir)
                rows.append(
                    [
                        source,
                        strategy,
                        result["baseline"],
                        result["fused"],
                        result["fused"] - result["baseline"],
                    ]
                )
            except Exception as exc:  # noqa: BLE001 - cell failures must not kill the grid
                failures[f"{source}/{strategy}"] = f"{type(exc).__name__}: {exc}"
                rows.append([source, strategy, float("nan"), float("nan"), float("nan")])
    csv_text = write_csv(header, rows, out_dir / "ablation.csv")
    (out_dir / "ablation.txt").write_text(render_table(header, rows))
    if failures:
        (out_dir / "failures.json").write_text(json.dumps(failures, indent=2) + "\n")
    return {"header": header, "rows": rows, "csv": csv_text, "failures": failures}
