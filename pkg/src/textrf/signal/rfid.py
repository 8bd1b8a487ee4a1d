"""RFID backscatter link budget.

Received power at the reader follows the two-way radar equation: the tag
gain enters squared (forward and reverse link) and free-space loss enters
as the fourth power of wavelength over 4*pi*d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from textrf.errors import InvalidArgument


@dataclass(frozen=True)
class RfidLink:
    """Reader-tag geometry and gains (all linear, not dB)."""

    p_tx: float  # transmit power, watts
    g_tx: float
    g_rx: float
    g_tag: float
    wavelength: float  # meters
    distance: float  # meters

    def __post_init__(self) -> None:
        if self.distance == 0:
            raise InvalidArgument("distance must be > 0 (free-space loss is singular at d=0)")
        for name in ("p_tx", "g_tx", "g_rx", "g_tag", "wavelength", "distance"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be > 0, got {getattr(self, name)}")


def rfid_received_power(link: RfidLink) -> float:
    """P_rx = P_tx * G_tx * G_rx * G_tag^2 * (lambda / (4 pi d))^4."""
    loss = link.wavelength / (4.0 * math.pi * link.distance)
    return link.p_tx * link.g_tx * link.g_rx * link.g_tag**2 * loss**4
