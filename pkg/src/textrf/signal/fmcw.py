"""FMCW radar model: beat-frequency range, Doppler velocity, monopulse angles,
IF-cube synthesis and range-Doppler processing.

Ranging convention: a target at range R produces a beat frequency
df = 2*B*R / (c*T_c), so range recovery R = c*df*T_c / (2*B) inverts the
synthesis exactly.  Velocity enters as a per-chirp phase step
w = 4*pi*v*T_c / lambda.  No window is applied before the FFTs; rectangular
weighting keeps the bin arithmetic exact for round-trip checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from textrf.errors import DomainError, InvalidArgument

SPEED_OF_LIGHT = 299792458.0  # m/s


@dataclass(frozen=True)
class FmcwParams:
    """Chirp parameters of the radar front end.

    bandwidth: swept bandwidth B in Hz
    chirp_duration: T_c in seconds
    carrier_wavelength: lambda in meters
    num_chirps: chirps per frame (slow-time length)
    samples_per_chirp: ADC samples per chirp (fast-time length)
    light_speed: propagation speed; override only in tests that quote c = 3e8
    """

    bandwidth: float
    chirp_duration: float
    carrier_wavelength: float
    num_chirps: int = 64
    samples_per_chirp: int = 64
    light_speed: float = SPEED_OF_LIGHT

    def __post_init__(self) -> None:
        if not (self.bandwidth > 0 and self.chirp_duration > 0):
            raise InvalidArgument("bandwidth and chirp_duration must be > 0")
        if self.num_chirps < 2 or self.samples_per_chirp < 2:
            raise InvalidArgument("num_chirps and samples_per_chirp must be >= 2")
        if not (self.carrier_wavelength > 0 and self.light_speed > 0):
            raise InvalidArgument("carrier_wavelength and light_speed must be > 0")

    @property
    def range_resolution(self) -> float:
        """Meters per range bin: c / (2B)."""
        return self.light_speed / (2.0 * self.bandwidth)

    @property
    def velocity_resolution(self) -> float:
        """(m/s) per Doppler bin: lambda / (2 * num_chirps * T_c)."""
        return self.carrier_wavelength / (2.0 * self.num_chirps * self.chirp_duration)

    @property
    def max_unambiguous_range(self) -> float:
        """Largest range whose beat frequency stays below Nyquist."""
        return self.light_speed * self.samples_per_chirp / (4.0 * self.bandwidth)

    @property
    def max_unambiguous_speed(self) -> float:
        """Largest |v| whose chirp-to-chirp phase step stays below pi."""
        return self.carrier_wavelength / (4.0 * self.chirp_duration)


@dataclass(frozen=True)
class FmcwTarget:
    """A point reflector seen by the radar."""

    range: float
    radial_velocity: float = 0.0
    elevation_phase: float = 0.0
    azimuth_phase: float = 0.0
    reflectivity: float = 1.0

    def __post_init__(self) -> None:
        if not self.range > 0:
            raise InvalidArgument(f"target range must be > 0, got {self.range}")
        if abs(self.elevation_phase) > math.pi or abs(self.azimuth_phase) > math.pi:
            raise InvalidArgument("antenna phase differences must lie in [-pi, pi]")


def fmcw_range(delta_f: float, params: FmcwParams) -> float:
    """Target distance from a beat-frequency offset: R = c * df * T_c / (2B)."""
    if not math.isfinite(delta_f):
        raise InvalidArgument(f"delta_f must be finite, got {delta_f}")
    if delta_f < 0:
        raise InvalidArgument(f"delta_f must be >= 0, got {delta_f}")
    return params.light_speed * delta_f * params.chirp_duration / (2.0 * params.bandwidth)


def fmcw_velocity(omega: float, params: FmcwParams) -> float:
    """Radial velocity from the per-chirp phase step: v = lambda * w / (4 pi T_c).

    The sign of omega is preserved, distinguishing approaching from receding
    targets.
    """
    if not math.isfinite(omega):
        raise InvalidArgument(f"omega must be finite, got {omega}")
    return params.carrier_wavelength * omega / (4.0 * math.pi * params.chirp_duration)


def fmcw_angles(omega_z: float, omega_x: float) -> tuple[float, float]:
    """Elevation and azimuth from vertical / horizontal antenna phase differences.

    phi = asin(w_z / pi), theta = asin(w_x / (cos(phi) * pi)).
    """
    if not (math.isfinite(omega_z) and math.isfinite(omega_x)):
        raise InvalidArgument("omega_z and omega_x must be finite")
    sz = omega_z / math.pi
    if abs(sz) > 1.0:
        raise DomainError(f"elevation: asin argument {sz:.6g} outside [-1, 1]")
    phi = math.asin(sz)
    sx = omega_x / (math.cos(phi) * math.pi)
    if abs(sx) > 1.0:
        raise DomainError(f"azimuth: asin argument {sx:.6g} outside [-1, 1]")
    theta = math.asin(sx)
    return phi, theta


def spherical_to_cartesian(range_m: float, phi: float, theta: float) -> tuple[float, float, float]:
    """Convert (R, elevation, azimuth) to Cartesian (x, y, z).

    x = R cos(phi) sin(theta), z = R sin(phi), y = sqrt(R^2 - x^2 - z^2).
    The positive square root is taken, so points behind the array plane
    (y < 0) are unrepresentable.
    """
    if not range_m > 0:
        raise InvalidArgument(f"range must be > 0, got {range_m}")
    x = range_m * math.cos(phi) * math.sin(theta)
    z = range_m * math.sin(phi)
    radicand = range_m * range_m - x * x - z * z
    # allow tiny negative values from rounding before declaring a domain error
    if radicand < -1e-9 * range_m * range_m:
        raise DomainError(f"y^2 = {radicand:.6g} < 0: point outside the sphere of radius R")
    y = math.sqrt(max(radicand, 0.0))
    return x, y, z


def synth_fmcw_cube(
    params: FmcwParams,
    targets: list[FmcwTarget],
    seed: int,
    noise_std: float = 0.0,
) -> np.ndarray:
    """Synthesize the complex IF sample cube, shape (num_chirps, samples_per_chirp).

    Each target adds reflectivity * exp(j * (2 pi f_beat t_n + w m)) with
    f_beat = 2 B R / (c T_c) and Doppler step w = 4 pi v T_c / lambda across
    chirps m.  Optional complex Gaussian noise (std per complex sample) is
    drawn from the seed, so the output is deterministic.
    """
    if not targets:
        raise InvalidArgument("need at least one target")
    if noise_std < 0:
        raise InvalidArgument("noise_std must be >= 0")
    r_max = params.max_unambiguous_range
    for t in targets:
        if t.range >= r_max:
            raise InvalidArgument(
                f"target range {t.range:.3g} m beyond unambiguous range {r_max:.3g} m"
            )

    n = np.arange(params.samples_per_chirp)
    m = np.arange(params.num_chirps)
    t_fast = n * (params.chirp_duration / params.samples_per_chirp)

    cube = np.zeros((params.num_chirps, params.samples_per_chirp), dtype=np.complex128)
    for tgt in targets:
        f_beat = 2.0 * params.bandwidth * tgt.range / (params.light_speed * params.chirp_duration)
        doppler_step = (
            4.0 * math.pi * tgt.radial_velocity * params.chirp_duration / params.carrier_wavelength
        )
        fast_phase = 2.0 * math.pi * f_beat * t_fast  # (samples,)
        slow_phase = doppler_step * m  # (chirps,)
        cube += tgt.reflectivity * np.exp(1j * (slow_phase[:, None] + fast_phase[None, :]))

    if noise_std > 0:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        noise = rng.normal(scale=noise_std / math.sqrt(2.0), size=(*cube.shape, 2))
        cube += noise[..., 0] + 1j * noise[..., 1]
    return cube


@dataclass
class RangeDopplerMap:
    """Magnitude map over (range bin, Doppler bin), Doppler axis centered on zero."""

    magnitudes: np.ndarray  # (samples_per_chirp, num_chirps), >= 0
    range_resolution: float
    velocity_resolution: float
    params: FmcwParams = field(repr=False)

    def range_axis(self) -> np.ndarray:
        return np.arange(self.magnitudes.shape[0]) * self.range_resolution

    def velocity_axis(self) -> np.ndarray:
        n = self.magnitudes.shape[1]
        return (np.arange(n) - n // 2) * self.velocity_resolution

    def peak(self) -> tuple[float, float]:
        """(range, velocity) of the strongest cell, searched below range Nyquist."""
        half = self.magnitudes.shape[0] // 2
        sub = self.magnitudes[:half, :]
        r_bin, d_bin = np.unravel_index(np.argmax(sub), sub.shape)
        return self.range_axis()[r_bin], self.velocity_axis()[d_bin]


def range_doppler_map(cube: np.ndarray, params: FmcwParams) -> RangeDopplerMap:
    """Fast-time FFT per chirp, then a second FFT across chirps; magnitudes only.

    The Doppler axis is fftshifted so bin k maps to velocity
    (k - num_chirps//2) * velocity_resolution.
    """
    cube = np.asarray(cube)
    if cube.shape != (params.num_chirps, params.samples_per_chirp):
        raise InvalidArgument(
            f"cube shape {cube.shape} does not match "
            f"(num_chirps={params.num_chirps}, samples_per_chirp={params.samples_per_chirp})"
        )
    range_fft = np.fft.fft(cube, axis=1)  # (chirps, range bins)
    doppler_fft = np.fft.fft(range_fft, axis=0)  # (doppler bins, range bins)
    mags = np.abs(np.fft.fftshift(doppler_fft, axes=0)).T  # (range, doppler)
    return RangeDopplerMap(
        magnitudes=mags,
        range_resolution=params.range_resolution,
        velocity_resolution=params.velocity_resolution,
        params=params,
    )
