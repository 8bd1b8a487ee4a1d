"""Synthetic MIMO-OFDM channel state information.

The channel per subcarrier is a discrete sum over propagation paths,
H_i(t) = sum_p gain_p * exp(-j * 2 pi * f_i * delay_p(t)): a set of static
paths (walls, furniture) plus at most one dynamic path whose delay drifts
with the moving person.  Pilot symbols are fixed to 1, so the estimated CSI
equals H_i plus complex Gaussian receiver noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from textrf.errors import InvalidArgument


@dataclass(frozen=True)
class StaticPath:
    gain: float
    delay: float  # seconds

    def __post_init__(self) -> None:
        if self.delay < 0:
            raise InvalidArgument(f"path delay must be >= 0, got {self.delay}")


@dataclass(frozen=True)
class DynamicPath:
    """Moving-scatterer path with delay(t) = delay0 + delay_rate * t.

    delay_fn, when given, overrides the linear law (it receives the sample
    times in seconds); such scenes cannot be serialized to JSON.
    """

    gain: float
    delay0: float
    delay_rate: float = 0.0
    delay_fn: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.delay0 < 0:
            raise InvalidArgument(f"path delay must be >= 0, got {self.delay0}")

    def delays(self, times: np.ndarray) -> np.ndarray:
        if self.delay_fn is not None:
            return np.asarray(self.delay_fn(times), dtype=np.float64)
        return self.delay0 + self.delay_rate * times


@dataclass(frozen=True)
class CsiScene:
    """Everything needed to synthesize one CSI recording.

    num_tx / num_rx / num_subcarriers give the MIMO and OFDM geometry;
    subcarrier_freqs are absolute carrier frequencies in Hz.
    """

    num_tx: int
    num_rx: int
    num_subcarriers: int
    subcarrier_freqs: Sequence[float]
    static_paths: Sequence[StaticPath] = ()
    dynamic_path: Optional[DynamicPath] = None
    noise_std: float = 0.0
    sample_rate: float = 100.0  # Hz
    duration: float = 1.0  # seconds

    def __post_init__(self) -> None:
        if self.num_tx < 1 or self.num_rx < 1 or self.num_subcarriers < 1:
            raise InvalidArgument("antenna and subcarrier counts must be >= 1")
        if len(self.subcarrier_freqs) != self.num_subcarriers:
            raise InvalidArgument(
                f"expected {self.num_subcarriers} subcarrier frequencies, "
                f"got {len(self.subcarrier_freqs)}"
            )
        if self.noise_std < 0:
            raise InvalidArgument("noise_std must be >= 0")
        if self.sample_rate <= 0 or self.duration <= 0:
            raise InvalidArgument("sample_rate and duration must be > 0")

    @property
    def num_samples(self) -> int:
        return max(1, int(round(self.sample_rate * self.duration)))

    @property
    def num_pairs(self) -> int:
        return self.num_rx * self.num_tx


def synth_csi_sequence(scene: CsiScene, seed: int) -> np.ndarray:
    """Complex CSI array of shape (time, subcarrier, rx*tx pair).

    The path sum is shared across antenna pairs (co-located idealization);
    receiver noise is drawn independently per element.  Deterministic for a
    given (scene, seed).
    """
    times = np.arange(scene.num_samples) / scene.sample_rate
    freqs = np.asarray(scene.subcarrier_freqs, dtype=np.float64)

    h = np.zeros((scene.num_samples, scene.num_subcarriers), dtype=np.complex128)
    for path in scene.static_paths:
        h += path.gain * np.exp(-2j * np.pi * freqs[None, :] * path.delay)
    if scene.dynamic_path is not None:
        delays = scene.dynamic_path.delays(times)  # (time,)
        h += scene.dynamic_path.gain * np.exp(-2j * np.pi * freqs[None, :] * delays[:, None])

    out = np.repeat(h[:, :, None], scene.num_pairs, axis=2)
    if scene.noise_std > 0:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        noise = rng.normal(scale=scene.noise_std / np.sqrt(2.0), size=(*out.shape, 2))
        out = out + noise[..., 0] + 1j * noise[..., 1]
    return out
