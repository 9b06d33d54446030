"""Link rates and the information-causality check.

Rates are Shannon rates in bits/s. Spectral-efficiency thresholds (bits/s/Hz)
compare against rate/bandwidth, i.e. the SNR must reach 2^threshold - 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .allocation import Schedule
from .channel import ChannelRealization
from .errors import DomainError
from .params import SystemParams

CAUSALITY_REL_TOL = 1e-9


@dataclass(frozen=True)
class RateResult:
    rate_bs: float
    rate_d2d: float
    causality_slack: float
    causality_ok: bool


def snr_floor(threshold_bits_per_hz: float) -> float:
    """Minimum SNR delivering a spectral efficiency threshold."""
    return 2.0 ** threshold_bits_per_hz - 1.0


def effective_noise_d2d(m_d2d: int, k_d2d: int, realization: ChannelRealization,
                        system: SystemParams) -> float:
    """Element-scenario D2D noise floor sigma_e^2.

    Active elements re-radiate amplified thermal noise toward D; the panel-D
    projection is approximated by the count-weighted per-element mean norm:
    sigma2^2 * (a_m^2*m(i'') + k(i'')) * ||h_rd||^2 / N + sigma1^2.
    """
    weight = system.amp_factor**2 * m_d2d + k_d2d
    per_element = realization.norm_hrd_sq / realization.n_elements
    return system.sigma2_sq * weight * per_element + system.sigma1_sq


def sigma_m1_sq(l_eh: float, realization: ChannelRealization,
                system: SystemParams) -> float:
    """Module-scenario BS-link noise floor sigma2^2 * L(i') * ||h_rs||^2 + sigma1^2."""
    return system.sigma2_sq * l_eh * realization.norm_hrs_sq + system.sigma1_sq


def sigma_m2_sq(l_d2d: float, realization: ChannelRealization,
                system: SystemParams) -> float:
    """Module-scenario D2D noise floor sigma2^2 * L(i'') * ||h_rd||^2 + sigma1^2."""
    return system.sigma2_sq * l_d2d * realization.norm_hrd_sq + system.sigma1_sq


def d2d_rate(harvested: float, t_d2d: float, h_sd: float, cascade_gain: float,
             sigma_eff_sq: float, bw: float) -> float:
    """Device-to-device rate, bits/s.

    The device spends its banked energy over the D2D slot, so the transmit
    power is harvested / t_d2d:
        bw * log2(1 + (harvested/t_d2d) * (h_sd + cascade_gain)^2 / sigma_eff_sq)
    """
    if t_d2d <= 0.0:
        raise DomainError(f"t_d2d must be positive, got {t_d2d}")
    if sigma_eff_sq <= 0.0:
        raise DomainError("sigma_eff_sq must be positive")
    snr = (harvested / t_d2d) * (h_sd + cascade_gain) ** 2 / sigma_eff_sq
    return bw * math.log2(1.0 + snr)


def bs_rate(p_b: float, h_bs: float, cascade_gain: float, sigma_eff_sq: float,
            bw: float) -> float:
    """BS-to-device rate, bits/s: bw * log2(1 + p_b*(h_bs + cascade_gain)^2 / sigma_eff_sq)."""
    if sigma_eff_sq <= 0.0:
        raise DomainError("sigma_eff_sq must be positive")
    snr = p_b * (h_bs + cascade_gain) ** 2 / sigma_eff_sq
    return bw * math.log2(1.0 + snr)


def causality_satisfied(schedule: Schedule, rate_bs: float, rate_d2d: float,
                        rel_tol: float = CAUSALITY_REL_TOL) -> RateResult:
    """Check the device forwards no more BS data than it received.

    Requires T(i') * R_bs <= T(i'') * R_d2d up to a relative slack of rel_tol.
    """
    received = schedule.t_eh * rate_bs
    forwarded = schedule.t_d2d * rate_d2d
    slack = forwarded - received
    ok = slack >= -rel_tol * max(1.0, received)
    return RateResult(rate_bs=rate_bs, rate_d2d=rate_d2d,
                      causality_slack=slack, causality_ok=ok)
