from textrf.signal.csi import CsiScene, DynamicPath, StaticPath, synth_csi_sequence
from textrf.signal.fmcw import (
    SPEED_OF_LIGHT,
    FmcwParams,
    FmcwTarget,
    RangeDopplerMap,
    fmcw_angles,
    fmcw_range,
    fmcw_velocity,
    range_doppler_map,
    spherical_to_cartesian,
    synth_fmcw_cube,
)
from textrf.signal.rfid import RfidLink, rfid_received_power

__all__ = [
    "SPEED_OF_LIGHT",
    "FmcwParams",
    "FmcwTarget",
    "RangeDopplerMap",
    "fmcw_range",
    "fmcw_velocity",
    "fmcw_angles",
    "spherical_to_cartesian",
    "synth_fmcw_cube",
    "range_doppler_map",
    "CsiScene",
    "StaticPath",
    "DynamicPath",
    "synth_csi_sequence",
    "RfidLink",
    "rfid_received_power",
]
