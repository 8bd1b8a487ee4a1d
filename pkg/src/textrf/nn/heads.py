"""Trainable heads: a two-layer HAR classifier and a strided-conv TAL pyramid.

Both expose parameters() / loss(batch) so the same Adam loop and the same
finite-difference gradient checker drive either one.  Parameters persist to
the flat-binary-plus-sidecar format used for signals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from textrf.errors import InvalidArgument
from textrf.nn.losses import cross_entropy_loss, focal_loss, localization_loss, tal_total_loss
from textrf.nn.tensor import Tensor, as_tensor, conv1d, uniform_init
from textrf.signal.arrayio import load_array, save_array


class HarHead:
    """input -> affine -> relu -> affine -> class logits."""

    def __init__(self, in_dim: int, hidden_dim: int, num_classes: int, rng: np.random.Generator):
        self.in_dim = in_dim
        self.hidden_dim = hidden_dim
        self.num_classes = num_classes
        self.w1 = uniform_init(rng, (in_dim, hidden_dim), in_dim, "har.w1")
        self.b1 = uniform_init(rng, (hidden_dim,), in_dim, "har.b1")
        self.w2 = uniform_init(rng, (hidden_dim, num_classes), hidden_dim, "har.w2")
        self.b2 = uniform_init(rng, (num_classes,), hidden_dim, "har.b2")

    def parameters(self) -> list[Tensor]:
        return [self.w1, self.b1, self.w2, self.b2]

    def logits(self, x) -> Tensor:
        x = as_tensor(x)
        hidden = (x @ self.w1 + self.b1).relu()
        return hidden @ self.w2 + self.b2

    def probabilities(self, x) -> Tensor:
        return self.logits(x).softmax(axis=1)

    def predict(self, x) -> np.ndarray:
        return np.argmax(self.logits(x).data, axis=1)

    def loss(self, batch) -> Tensor:
        x, y = batch
        return cross_entropy_loss(self.probabilities(x), y)

    def accuracy(self, x, y) -> float:
        return float(np.mean(self.predict(x) == np.asarray(y)))


@dataclass
class LevelTargets:
    """Per-position supervision for one pyramid level."""

    classes: np.ndarray  # (T_i,) int; num_classes == background
    offsets: np.ndarray  # (T_i, 2) float, valid where positive
    positive: np.ndarray  # (T_i,) bool


class TalPyramid:
    """K-level pyramid of strided 1-d convs with per-level class / offset branches.

    Level 1 keeps the input length T; each further level halves it (ceil),
    so level i has length ceil(T / 2^(i-1)).  The classification branch emits
    num_classes + 1 logits per position (last = background); the localization
    branch emits two non-negative offsets to the segment start / end.
    """

    KERNEL = 3

    def __init__(
        self,
        in_dim: int,
        channels: int,
        num_classes: int,
        num_levels: int,
        rng: np.random.Generator,
    ):
        if num_levels < 1:
            raise InvalidArgument("num_levels must be >= 1")
        self.in_dim = in_dim
        self.channels = channels
        self.num_classes = num_classes
        self.num_levels = num_levels
        k = self.KERNEL

        def conv_init(c_in, c_out, tag):
            fan = c_in * k
            w = uniform_init(rng, (c_out, c_in, k), fan, f"{tag}.w")
            b = uniform_init(rng, (c_out,), fan, f"{tag}.b")
            return w, b

        self.stem = conv_init(in_dim, channels, "tal.stem")
        self.level_convs = [
            conv_init(channels, channels, f"tal.level{i}") for i in range(num_levels)
        ]
        self.cls_heads = [
            conv_init(channels, num_classes + 1, f"tal.cls{i}") for i in range(num_levels)
        ]
        self.loc_heads = [conv_init(channels, 2, f"tal.loc{i}") for i in range(num_levels)]

    def parameters(self) -> list[Tensor]:
        params = list(self.stem)
        for group in (self.level_convs, self.cls_heads, self.loc_heads):
            for w, b in group:
                params.extend([w, b])
        return params

    def strides(self) -> list[int]:
        return [2**i for i in range(self.num_levels)]

    def forward(self, x) -> list[tuple[Tensor, Tensor]]:
        """x: (B, C_in, T) -> per level (class logits (B, C+1, T_i), offsets (B, 2, T_i))."""
        x = as_tensor(x)
        feat = conv1d(x, *self.stem, stride=1, padding=1).relu()
        outputs = []
        for i in range(self.num_levels):
            stride = 1 if i == 0 else 2
            feat = conv1d(feat, *self.level_convs[i], stride=stride, padding=1).relu()
            cls = conv1d(feat, *self.cls_heads[i], stride=1, padding=1)
            loc = conv1d(feat, *self.loc_heads[i], stride=1, padding=1).relu()
            outputs.append((cls, loc))
        return outputs

    def assign_targets(self, segments, length: int) -> list[LevelTargets]:
        """Per-level positive positions: a position is positive when its
        input-scale coordinate falls inside a ground-truth segment.

        segments: iterable of (start, end, class_id) in input-scale units.
        """
        targets = []
        t_level = length
        for i, stride in enumerate(self.strides()):
            coords = np.arange(t_level) * stride
            classes = np.full(t_level, self.num_classes, dtype=int)
            offsets = np.zeros((t_level, 2))
            positive = np.zeros(t_level, dtype=bool)
            for start, end, class_id in segments:
                inside = (coords >= start) & (coords < end)
                take = inside & ~positive  # first segment wins on overlap
                classes[take] = int(class_id)
                offsets[take, 0] = coords[take] - start
                offsets[take, 1] = end - coords[take]
                positive |= inside
            targets.append(LevelTargets(classes=classes, offsets=offsets, positive=positive))
            t_level = (t_level + 1) // 2
        return targets

    def loss(self, batch) -> Tensor:
        """batch: (features (B, C_in, T), per-sample list of LevelTargets lists)."""
        x, target_lists = batch
        outputs = self.forward(x)
        if any(len(t) != self.num_levels for t in target_lists):
            raise InvalidArgument("targets must cover every pyramid level")
        cls_losses, loc_losses = [], []
        for level, (cls_out, loc_out) in enumerate(outputs):
            level_targets = [t[level] for t in target_lists]
            # (B, C+1, T_i) -> (B*T_i, C+1)
            logits = cls_out.swapaxes(1, 2).reshape(-1, self.num_classes + 1)
            labels = np.concatenate([t.classes for t in level_targets])
            cls_losses.append(focal_loss(logits, labels))

            pos_mask = np.concatenate([t.positive for t in level_targets])
            offs = loc_out.swapaxes(1, 2).reshape(-1, 2)
            gt_offs = np.concatenate([t.offsets for t in level_targets])
            idx = np.flatnonzero(pos_mask)
            loc_losses.append(localization_loss(offs[idx], gt_offs[idx]))
        return tal_total_loss(cls_losses, loc_losses)

    def detect(
        self, x, score_threshold: float = 0.2, time_scale: float = 1.0
    ) -> list[list[tuple[float, float, int, float]]]:
        """Decode (start, end, class_id, score) per sample.

        Every position whose best non-background softmax score clears the
        threshold emits a detection; the recall-style AP has no
        false-positive penalty, so no suppression is applied.
        """
        outputs = self.forward(x)
        batch = x.shape[0] if not isinstance(x, Tensor) else x.data.shape[0]
        detections: list[list[tuple[float, float, int, float]]] = [[] for _ in range(batch)]
        for level, (cls_out, loc_out) in enumerate(outputs):
            stride = self.strides()[level]
            e = np.exp(cls_out.data - cls_out.data.max(axis=1, keepdims=True))
            probs = e / e.sum(axis=1, keepdims=True)  # (B, C+1, T_i)
            fg = probs[:, : self.num_classes, :]
            best_class = fg.argmax(axis=1)  # (B, T_i)
            best_score = fg.max(axis=1)
            for b in range(batch):
                for t in range(best_score.shape[1]):
                    score = float(best_score[b, t])
                    if score < score_threshold:
                        continue
                    coord = t * stride
                    start = (coord - float(loc_out.data[b, 0, t])) * time_scale
                    end = (coord + float(loc_out.data[b, 1, t])) * time_scale
                    if end <= start:
                        continue
                    detections[b].append((start, end, int(best_class[b, t]), score))
        return detections


def save_params(model, out_dir: str | Path) -> None:
    """One flat binary per parameter plus a manifest of names and shapes."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for i, p in enumerate(model.parameters()):
        name = p.name or f"param{i}"
        fname = f"{i:03d}_{name.replace('.', '_')}.bin"
        save_array(out_dir / fname, p.data, [f"dim{d}" for d in range(max(p.data.ndim, 1))])
        manifest.append({"file": fname, "name": name, "shape": list(p.shape)})
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def load_params(model, in_dir: str | Path) -> None:
    in_dir = Path(in_dir)
    manifest = json.loads((in_dir / "manifest.json").read_text())
    params = model.parameters()
    if len(manifest) != len(params):
        raise InvalidArgument(
            f"manifest lists {len(manifest)} parameters, model has {len(params)}"
        )
    for entry, p in zip(manifest, params):
        data, _ = load_array(in_dir / entry["file"])
        if tuple(data.shape) != tuple(p.shape):
            raise InvalidArgument(
                f"parameter {entry['name']}: stored shape {data.shape} != model shape {p.shape}"
            )
        p.data = data.astype(np.float64).reshape(p.shape)
