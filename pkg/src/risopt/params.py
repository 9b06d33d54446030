"""Scenario parameter types and validation.

Two frozen dataclasses describe a scenario: SystemParams (panel, harvester,
radio and frame constants) and ChannelParams (geometry and fading constants).
Defaults follow the evaluation setup used throughout the test suite; every
value can be overridden from a config file.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidParam

# -10 dBm and -5 dBm element electronics, -121.45 dBm thermal noise
P_SC_DEFAULT = 1.0e-4
P_DC_DEFAULT = 10 ** (-5 / 10) * 1e-3
NOISE_DEFAULT = 10 ** (-121.45 / 10) * 1e-3


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParam(msg)


@dataclass(frozen=True)
class SystemParams:
    """Panel, harvester and air-interface constants for one scenario.

    Attributes:
        n_total: total number of reflecting elements on the panel (N).
        amp_factor: amplification gain of an active element (a_m >= 1).
        amp_efficiency: DC-to-RF efficiency of the shared amplifier stage, in (0, 1].
        p_sc: static power of one element's switching circuit, watts.
        p_dc: extra DC biasing power of one active element, watts.
        zeta: RF-to-DC conversion efficiency of the harvester, in (0, 1].
        harvest_max: saturation harvest rate of the non-linear harvester, watts.
        y1: harvester sigmoid steepness, 1/watt.
        y2: harvester sigmoid midpoint, watts.
        e_min: energy the device must bank during the harvest slot, joules.
        rate_thresh_d2d: device-to-device spectral-efficiency floor, bits/s/Hz.
        rate_thresh_bs: base-station spectral-efficiency reference, bits/s/Hz.
        bw1, bw2, bw3: bandwidths of the D2D, BS downlink and forwarding links, Hz.
        sigma1_sq: receiver noise power, watts.
        sigma2_sq: thermal noise power added by active elements, watts.
        t_frame: total frame duration T(i), seconds.
        p_b_max: BS transmit power cap, watts.
        p_b_min: BS broadcast floor, watts (the BS always carries some traffic).
        t_slot_min: minimum slot length, seconds; None resolves to 0.5% of t_frame.
    """

    n_total: int = 300
    amp_factor: float = 2.5
    amp_efficiency: float = 0.5
    p_sc: float = P_SC_DEFAULT
    p_dc: float = P_DC_DEFAULT
    zeta: float = 0.4
    harvest_max: float = 1.0
    y1: float = 150.0
    y2: float = 0.014
    e_min: float = 3.0e-3
    rate_thresh_d2d: float = 0.1
    rate_thresh_bs: float = 0.1
    bw1: float = 180e3
    bw2: float = 180e3
    bw3: float = 180e3
    sigma1_sq: float = NOISE_DEFAULT
    sigma2_sq: float = NOISE_DEFAULT
    t_frame: float = 0.2
    p_b_max: float = 1.0
    p_b_min: float = 1.0e-3
    t_slot_min: float | None = None

    def __post_init__(self) -> None:
        if self.t_slot_min is None:
            object.__setattr__(self, "t_slot_min", 0.005 * self.t_frame)
        _require(isinstance(self.n_total, int) and self.n_total >= 1,
                 f"n_total must be a positive integer, got {self.n_total}")
        _require(self.amp_factor >= 1.0, f"amp_factor must be >= 1, got {self.amp_factor}")
        _require(0.0 < self.amp_efficiency <= 1.0,
                 f"amp_efficiency must lie in (0, 1], got {self.amp_efficiency}")
        _require(0.0 < self.zeta <= 1.0, f"zeta must lie in (0, 1], got {self.zeta}")
        for name in ("p_sc", "p_dc", "rate_thresh_d2d", "rate_thresh_bs"):
            _require(getattr(self, name) >= 0.0, f"{name} must be non-negative")
        for name in ("harvest_max", "y1", "y2", "e_min", "bw1", "bw2", "bw3",
                     "sigma1_sq", "sigma2_sq", "t_frame", "p_b_max"):
            _require(getattr(self, name) > 0.0, f"{name} must be positive")
        _require(0.0 < self.p_b_min <= self.p_b_max,
                 f"p_b_min must lie in (0, p_b_max], got {self.p_b_min}")
        _require(0.0 < self.t_slot_min < 0.5 * self.t_frame,
                 "t_slot_min must leave room for both slots")


@dataclass(frozen=True)
class ChannelParams:
    """Geometry and fading constants.

    The panel sits on the S--D segment at distance d_ris_s from the device S,
    collinear with BS--S--D, so the four panel links have segment lengths
    d1 + d_ris_s (BS-panel), d_ris_s (panel-S, both directions) and
    d2 - d_ris_s (panel-D). Direct links use exponents delta1/delta2, panel
    segments use delta_ris. Path loss follows 16*pi^2*d^delta / lambda^2.
    """

    d1: float = 50.0
    d2: float = 20.0
    delta1: float = 2.2
    delta2: float = 2.2
    rician_e: float = 3.0
    rician_s: float = 3.0
    wavelength: float = 0.15
    d_ris_s: float | None = None
    delta_ris: float = 2.2

    def __post_init__(self) -> None:
        if self.d_ris_s is None:
            object.__setattr__(self, "d_ris_s", 0.25 * self.d2)
        for name in ("d1", "d2", "wavelength", "delta1", "delta2", "delta_ris"):
            _require(getattr(self, name) > 0.0, f"{name} must be positive")
        for name in ("rician_e", "rician_s"):
            _require(getattr(self, name) >= 0.0, f"{name} must be non-negative")
        _require(0.0 < self.d_ris_s < self.d2,
                 "d_ris_s must place the panel strictly between S and D")

    def path_loss(self, distance: float, exponent: float) -> float:
        """Power path loss 16*pi^2*d^delta / lambda^2 (dimensionless, > 1 in far field)."""
        return 16.0 * math.pi**2 * distance**exponent / self.wavelength**2


def validate(system: SystemParams, channel: ChannelParams | None = None) -> None:
    """Cross-field consistency checks beyond per-field construction checks.

    Raises InvalidParam when the scenario cannot support any schedule, e.g.
    when even a full frame of saturated harvesting cannot bank e_min.
    """
    _require(system.harvest_max * system.t_frame > system.e_min,
             "harvest_max * t_frame must exceed e_min or no schedule can harvest enough")
    _require(system.e_min < system.harvest_max * (system.t_frame - system.t_slot_min),
             "e_min leaves no room for a positive D2D slot")
    if channel is not None:
        # construction already validated fields; re-run for mutated copies
        ChannelParams(**{f: getattr(channel, f) for f in channel.__dataclass_fields__})
