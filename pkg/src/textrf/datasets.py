"""Synthetic labeled datasets for the W vs. W+T experiments.

HAR samples are fixed-length feature sequences (time x channels) whose scene
parameters depend on the class: CSI classes differ in dynamic-path delay rate
and gain, FMCW classes in target range/velocity, RFID classes in the
frequency and depth of the reader-tag distance oscillation.  TAL recordings
are longer sequences with class-dependent patterns injected over annotated
intervals.

When an embedding matrix is supplied, a fixed random channel direction per
class (derived from the label's embedding) is added to that class's
sequences, so the text branch has class-correlated structure to exploit;
the baseline model sees exactly the same features, keeping the comparison
fair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from textrf.errors import InvalidArgument
from textrf.signal import (
    CsiScene,
    DynamicPath,
    FmcwParams,
    FmcwTarget,
    RfidLink,
    StaticPath,
    range_doppler_map,
    rfid_received_power,
    synth_csi_sequence,
    synth_fmcw_cube,
)
from textrf.signal.arrayio import load_array, save_array

MODALITIES = ("csi", "fmcw", "rfid")


@dataclass
class HarDataset:
    sequences: np.ndarray  # (N, T, CH)
    labels: np.ndarray  # (N,) int indices into classes
    classes: list[str]
    modality: str

    def __len__(self) -> int:
        return len(self.labels)


@dataclass
class TalDataset:
    recordings: np.ndarray  # (N, T, CH)
    segments: list[list[tuple[float, float, int]]]  # per recording (start, end, class)
    classes: list[str]
    feature_rate: float  # feature frames per second

    def __len__(self) -> int:
        return len(self.segments)


# --- per-modality sequence synthesis ------------------------------------------------


def _csi_sequence(class_idx: int, rng: np.random.Generator, sample_seed: int) -> np.ndarray:
    num_sub = 8
    freqs = [5.18e9 + 312.5e3 * k for k in range(num_sub)]
    delay_rate = (0.7 + 0.7 * class_idx + rng.uniform(-0.25, 0.25)) * 1e-10
    gain = 0.5 + 0.18 * class_idx + rng.uniform(-0.1, 0.1)
    scene = CsiScene(
        num_tx=1,
        num_rx=1,
        num_subcarriers=num_sub,
        subcarrier_freqs=freqs,
        static_paths=(StaticPath(gain=1.0, delay=18e-9),),
        dynamic_path=DynamicPath(gain=gain, delay0=25e-9, delay_rate=delay_rate),
        noise_std=0.15,
        sample_rate=100.0,
        duration=1.28,
    )
    csi = synth_csi_sequence(scene, seed=sample_seed)[:, :, 0]  # (T, S_c)
    amp = np.abs(csi)
    phase_diff = np.diff(np.unwrap(np.angle(csi), axis=0), axis=0, prepend=np.angle(csi)[:1])
    return np.concatenate([amp, phase_diff], axis=1)  # (T, 2*S_c)


def _fmcw_sequence(class_idx: int, rng: np.random.Generator, sample_seed: int) -> np.ndarray:
    params = FmcwParams(
        bandwidth=1e9,
        chirp_duration=40e-6,
        carrier_wavelength=4e-3,
        num_chirps=24,
        samples_per_chirp=48,
    )
    # class layout stays inside the unambiguous range (~3.6 m)
    base_range = 0.8 + 1.0 * class_idx + rng.uniform(-0.12, 0.12)
    velocity = (-3.5 + 3.5 * class_idx) + rng.uniform(-0.3, 0.3)
    frames = 12
    rows = []
    for f in range(frames):
        r = base_range + rng.uniform(-0.03, 0.03)
        cube = synth_fmcw_cube(
            params,
            [FmcwTarget(range=float(r), radial_velocity=velocity)],
            seed=sample_seed + f,
            noise_std=0.3,
        )
        rdm = range_doppler_map(cube, params)
        r_hat, v_hat = rdm.peak()
        rows.append(
            [
                r_hat,
                v_hat,
                np.log1p(rdm.magnitudes.max()),
                np.log1p(rdm.magnitudes.sum()),
            ]
        )
    return np.asarray(rows)  # (frames, 4)


def _rfid_sequence(class_idx: int, rng: np.random.Generator, sample_seed: int) -> np.ndarray:
    sway_amp = (0.04, 0.18, 0.4)[class_idx % 3] * (1 + rng.uniform(-0.1, 0.1))
    sway_freq = (0.4, 1.2, 2.2)[class_idx % 3] * (1 + rng.uniform(-0.08, 0.08))
    phase0 = rng.uniform(0, 2 * np.pi)
    t = np.arange(128) / 100.0
    noise_rng = np.random.default_rng(np.random.SeedSequence((sample_seed, 3)))
    power = np.empty_like(t)
    for i, ti in enumerate(t):
        d = 2.0 + sway_amp * np.sin(2 * np.pi * sway_freq * ti + phase0)
        link = RfidLink(p_tx=1.0, g_tx=4.0, g_rx=4.0, g_tag=1.6, wavelength=0.33, distance=d)
        power[i] = rfid_received_power(link)
    power = power / power.mean()
    power += noise_rng.normal(scale=0.01, size=power.shape)
    delta = np.diff(power, prepend=power[:1])
    window = 8
    kernel = np.ones(window) / window
    rolling_mean = np.convolve(power, kernel, mode="same")
    rolling_absdelta = np.convolve(np.abs(delta), kernel, mode="same")
    return np.stack([power, delta, rolling_mean, rolling_absdelta], axis=1)  # (T, 4)


_SYNTH = {"csi": _csi_sequence, "fmcw": _fmcw_sequence, "rfid": _rfid_sequence}


def class_direction(embedding: np.ndarray, channels: int, seed: int) -> np.ndarray:
    """Unit channel-space direction tied to a label embedding via a fixed
    random projection."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0xD1AEC7)))
    projector = rng.normal(size=(channels, len(embedding)))
    direction = projector @ embedding
    return direction / np.linalg.norm(direction)


def generate_har_dataset(
    modality: str,
    classes: list[str],
    samples_per_class: int,
    seed: int,
    embeddings: np.ndarray | None = None,  # (num_classes, C) mean embedding per label
    coupling: float = 0.0,
    direction_seed: int = 0,
) -> HarDataset:
    """direction_seed fixes the embedding-to-channel projection independently
    of the split seed, so train and test share the injected class structure."""
    if modality not in MODALITIES:
        raise InvalidArgument(f"modality must be one of {MODALITIES}, got {modality!r}")
    if embeddings is not None and len(embeddings) != len(classes):
        raise InvalidArgument("need one embedding row per class")
    synth = _SYNTH[modality]
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0x6E4)))
    sequences, labels = [], []
    for class_idx in range(len(classes)):
        for j in range(samples_per_class):
            sample_seed = int(rng.integers(0, 2**31 - 1))
            seq = synth(class_idx, rng, sample_seed)
            sequences.append(seq)
            labels.append(class_idx)
    data = np.stack(sequences)
    if embeddings is not None and coupling > 0:
        for class_idx in range(len(classes)):
            direction = class_direction(embeddings[class_idx], data.shape[2], direction_seed)
            data[np.asarray(labels) == class_idx] += coupling * direction[None, None, :]
    return HarDataset(sequences=data, labels=np.asarray(labels), classes=list(classes), modality=modality)


def generate_tal_dataset(
    classes: list[str],
    num_recordings: int,
    seed: int,
    length: int = 96,
    channels: int = 4,
    feature_rate: float = 8.0,
    embeddings: np.ndarray | None = None,
    coupling: float = 0.0,
    direction_seed: int = 0,
) -> TalDataset:
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0x7A1)))
    recordings = rng.normal(scale=0.08, size=(num_recordings, length, channels))
    all_segments: list[list[tuple[float, float, int]]] = []
    for r in range(num_recordings):
        segments = []
        cursor = int(rng.integers(4, 12))
        for _ in range(int(rng.integers(1, 3))):
            duration = int(rng.integers(12, 25))
            if cursor + duration >= length - 2:
                break
            class_idx = int(rng.integers(0, len(classes)))
            pattern = np.zeros(channels)
            pattern[class_idx % channels] = 1.0
            wobble = 0.25 * np.sin(
                2 * np.pi * (0.5 + 0.3 * class_idx) * np.arange(duration) / feature_rate
            )
            recordings[r, cursor : cursor + duration] += pattern[None, :] * (1.0 + wobble)[:, None]
            if embeddings is not None and coupling > 0:
                direction = class_direction(embeddings[class_idx], channels, direction_seed)
                recordings[r, cursor : cursor + duration] += coupling * direction[None, :]
            segments.append((float(cursor), float(cursor + duration), class_idx))
            cursor += duration + int(rng.integers(6, 14))
        if not segments:  # guarantee at least one annotated action
            duration = 16
            start = length // 3
            segments.append((float(start), float(start + duration), 0))
            recordings[r, start : start + duration, 0] += 1.0
        all_segments.append(segments)
    return TalDataset(
        recordings=recordings,
        segments=all_segments,
        classes=list(classes),
        feature_rate=feature_rate,
    )


def extract_features(sequences: np.ndarray) -> np.ndarray:
    """(N, T, CH) -> (N, 2*CH): per-channel temporal mean and std."""
    return np.concatenate([sequences.mean(axis=1), sequences.std(axis=1)], axis=1)


def make_separable_task(seed: int, n_per_class: int = 40, dim: int = 6, margin: float = 2.0):
    """Two Gaussian blobs split by a known hyperplane; the sanity task for the
    training loop.  Returns (x, y, normal) where `normal` is the separating
    direction, usable as an independent separability check."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0x5E9)))
    normal = rng.normal(size=dim)
    normal /= np.linalg.norm(normal)
    x, y = [], []
    for cls, sign in ((0, -1.0), (1, 1.0)):
        pts = rng.normal(scale=0.4, size=(n_per_class, dim)) + sign * margin * normal
        x.append(pts)
        y += [cls] * n_per_class
    return np.vstack(x), np.asarray(y), normal


def standardize(train: np.ndarray, *others: np.ndarray):
    """Z-score using the training statistics; degenerate dims keep unit scale."""
    mean = train.mean(axis=0)
    std = train.std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    out = [(train - mean) / std] + [(o - mean) / std for o in others]
    return out if others else out[0]


# --- persistence ----------------------------------------------------------------------


def save_har_dataset(train: HarDataset, test: HarDataset, out_dir: str | Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_array(out_dir / "train_sequences.bin", train.sequences, ["sample", "time", "channel"])
    save_array(out_dir / "test_sequences.bin", test.sequences, ["sample", "time", "channel"])
    meta = {
        "task": "har",
        "modality": train.modality,
        "classes": train.classes,
        "train_labels": train.labels.tolist(),
        "test_labels": test.labels.tolist(),
    }
    (out_dir / "meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def load_har_dataset(in_dir: str | Path) -> tuple[HarDataset, HarDataset]:
    in_dir = Path(in_dir)
    meta = json.loads((in_dir / "meta.json").read_text())
    if meta.get("task") != "har":
        raise InvalidArgument(f"{in_dir} does not hold a HAR dataset")
    train_seq, _ = load_array(in_dir / "train_sequences.bin")
    test_seq, _ = load_array(in_dir / "test_sequences.bin")
    make = lambda seq, labels: HarDataset(
        sequences=seq.astype(np.float64),
        labels=np.asarray(labels),
        classes=meta["classes"],
        modality=meta["modality"],
    )
    return make(train_seq, meta["train_labels"]), make(test_seq, meta["test_labels"])


def save_tal_dataset(train: TalDataset, test: TalDataset, out_dir: str | Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_array(out_dir / "train_recordings.bin", train.recordings, ["recording", "time", "channel"])
    save_array(out_dir / "test_recordings.bin", test.recordings, ["recording", "time", "channel"])
    meta = {
        "task": "tal",
        "classes": train.classes,
        "feature_rate": train.feature_rate,
        "train_segments": train.segments,
        "test_segments": test.segments,
    }
    (out_dir / "meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def load_tal_dataset(in_dir: str | Path) -> tuple[TalDataset, TalDataset]:
    in_dir = Path(in_dir)
    meta = json.loads((in_dir / "meta.json").read_text())
    if meta.get("task") != "tal":
        raise InvalidArgument(f"{in_dir} does not hold a TAL dataset")
    train_rec, _ = load_array(in_dir / "train_recordings.bin")
    test_rec, _ = load_array(in_dir / "test_recordings.bin")
    make = lambda rec, segs: TalDataset(
        recordings=rec.astype(np.float64),
        segments=[[(float(s), float(e), int(c)) for s, e, c in per_rec] for per_rec in segs],
        classes=meta["classes"],
        feature_rate=meta["feature_rate"],
    )
    return make(train_rec, meta["train_segments"]), make(test_rec, meta["test_segments"])
