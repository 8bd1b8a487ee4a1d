"""Flat little-endian binary arrays with a JSON sidecar, plus scene JSON.

The sidecar at <path>.json records shape, dtype and axis names.  Complex
arrays are stored as complex64: interleaved (real, imag) float32 pairs.
Real arrays are stored as little-endian float32 or float64.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from textrf.errors import InvalidArgument
from textrf.signal.csi import CsiScene, DynamicPath, StaticPath
from textrf.signal.fmcw import FmcwParams, FmcwTarget
from textrf.signal.rfid import RfidLink

_DTYPES = {
    "float32": np.dtype("<f4"),
    "float64": np.dtype("<f8"),
    "complex64": np.dtype("<c8"),
}


def save_array(path: str | Path, arr: np.ndarray, axes: Sequence[str]) -> None:
    """Write arr to path and its shape/dtype/axes sidecar to path + '.json'."""
    path = Path(path)
    arr = np.asarray(arr)
    if len(axes) != arr.ndim:
        raise InvalidArgument(f"{arr.ndim}-d array needs {arr.ndim} axis names, got {len(axes)}")
    if np.iscomplexobj(arr):
        dtype_name = "complex64"
    elif arr.dtype == np.float32:
        dtype_name = "float32"
    else:
        dtype_name = "float64"
    path.write_bytes(np.ascontiguousarray(arr.astype(_DTYPES[dtype_name])).tobytes())
    sidecar = {
        "shape": list(arr.shape),
        "dtype": dtype_name,
        "axes": list(axes),
    }
    Path(str(path) + ".json").write_text(json.dumps(sidecar, sort_keys=True) + "\n")


def load_array(path: str | Path) -> tuple[np.ndarray, list[str]]:
    """Read an array written by save_array; returns (array, axis names)."""
    path = Path(path)
    sidecar = json.loads(Path(str(path) + ".json").read_text())
    dtype_name = sidecar["dtype"]
    if dtype_name not in _DTYPES:
        raise InvalidArgument(f"unsupported dtype {dtype_name!r} in sidecar for {path}")
    flat = np.frombuffer(path.read_bytes(), dtype=_DTYPES[dtype_name])
    shape = tuple(sidecar["shape"])
    expected = int(np.prod(shape)) if shape else 1
    if flat.size != expected:
        raise InvalidArgument(
            f"{path}: payload holds {flat.size} elements, sidecar shape {shape} needs {expected}"
        )
    return flat.reshape(shape).copy(), list(sidecar["axes"])


# --- scene (de)serialization ------------------------------------------------


def scene_to_dict(scene: CsiScene | FmcwParams | RfidLink) -> dict:
    if isinstance(scene, CsiScene):
        if scene.dynamic_path is not None and scene.dynamic_path.delay_fn is not None:
            raise InvalidArgument("scenes with a callable delay trajectory cannot be serialized")
        d: dict = {
            "kind": "csi",
            "num_tx": scene.num_tx,
            "num_rx": scene.num_rx,
            "num_subcarriers": scene.num_subcarriers,
            "subcarrier_freqs": list(map(float, scene.subcarrier_freqs)),
            "static_paths": [{"gain": p.gain, "delay": p.delay} for p in scene.static_paths],
            "noise_std": scene.noise_std,
            "sample_rate": scene.sample_rate,
            "duration": scene.duration,
        }
        if scene.dynamic_path is not None:
            p = scene.dynamic_path
            d["dynamic_path"] = {"gain": p.gain, "delay0": p.delay0, "delay_rate": p.delay_rate}
        return d
    if isinstance(scene, FmcwParams):
        return {
            "kind": "fmcw",
            "bandwidth": scene.bandwidth,
            "chirp_duration": scene.chirp_duration,
            "carrier_wavelength": scene.carrier_wavelength,
            "num_chirps": scene.num_chirps,
            "samples_per_chirp": scene.samples_per_chirp,
            "light_speed": scene.light_speed,
        }
    if isinstance(scene, RfidLink):
        return {
            "kind": "rfid",
            "p_tx": scene.p_tx,
            "g_tx": scene.g_tx,
            "g_rx": scene.g_rx,
            "g_tag": scene.g_tag,
            "wavelength": scene.wavelength,
            "distance": scene.distance,
        }
    raise InvalidArgument(f"unsupported scene type {type(scene).__name__}")


def scene_from_dict(d: dict) -> CsiScene | FmcwParams | RfidLink:
    kind = d.get("kind")
    if kind == "csi":
        dyn = None
        if "dynamic_path" in d and d["dynamic_path"] is not None:
            p = d["dynamic_path"]
            dyn = DynamicPath(gain=p["gain"], delay0=p["delay0"], delay_rate=p["delay_rate"])
        return CsiScene(
            num_tx=d["num_tx"],
            num_rx=d["num_rx"],
            num_subcarriers=d["num_subcarriers"],
            subcarrier_freqs=d["subcarrier_freqs"],
            static_paths=tuple(
                StaticPath(gain=p["gain"], delay=p["delay"]) for p in d.get("static_paths", [])
            ),
            dynamic_path=dyn,
            noise_std=d.get("noise_std", 0.0),
            sample_rate=d.get("sample_rate", 100.0),
            duration=d.get("duration", 1.0),
        )
    if kind == "fmcw":
        return FmcwParams(
            bandwidth=d["bandwidth"],
            chirp_duration=d["chirp_duration"],
            carrier_wavelength=d["carrier_wavelength"],
            num_chirps=d["num_chirps"],
            samples_per_chirp=d["samples_per_chirp"],
            light_speed=d.get("light_speed", 299792458.0),
        )
    if kind == "rfid":
        return RfidLink(
            p_tx=d["p_tx"],
            g_tx=d["g_tx"],
            g_rx=d["g_rx"],
            g_tag=d["g_tag"],
            wavelength=d["wavelength"],
            distance=d["distance"],
        )
    raise InvalidArgument(f"unknown scene kind {kind!r}")


def target_to_dict(t: FmcwTarget) -> dict:
    return {
        "range": t.range,
        "radial_velocity": t.radial_velocity,
        "elevation_phase": t.elevation_phase,
        "azimuth_phase": t.azimuth_phase,
        "reflectivity": t.reflectivity,
    }


def target_from_dict(d: dict) -> FmcwTarget:
    return FmcwTarget(**d)
