"""Panel power accounting.

Per slot j the panel draws a static part p_ss(j) = k(j) * p_sc from passive
elements and a control/amplification part

    p_ct(j) = m(j) * (p_sc + p_dc) + p_out(j) / v

where p_out is the amplifier stage's output power in that slot (incident
signal power scaled by a_m^2, plus thermal noise) and v its efficiency. The
output-dependent term is a single shared stage: it does not scale with m(j)
and its sigma2_sq contribution remains even at m(j) = 0. Total panel energy
is the time-weighted sum over both slots.
"""
from __future__ import annotations

from dataclasses import dataclass

from .allocation import Schedule
from .errors import DomainError
from .params import SystemParams


@dataclass(frozen=True)
class PowerBreakdown:
    """Slot powers (watts) and frame energy (joules) of the panel."""

    passive_eh: float
    active_eh: float
    amp_out_eh: float
    passive_d2d: float
    active_d2d: float
    amp_out_d2d: float
    total_energy: float


def passive_power(count: int, p_sc: float) -> float:
    """Static draw of `count` switched-on passive elements."""
    if count < 0:
        raise DomainError("count must be non-negative")
    return count * p_sc


def amplifier_output_dependent(p_out: float, amp_efficiency: float) -> float:
    """DC draw of the amplifier stage delivering p_out watts of RF."""
    if amp_efficiency <= 0.0:
        raise DomainError("amp_efficiency must be positive")
    if p_out < 0.0:
        raise DomainError("p_out must be non-negative")
    return p_out / amp_efficiency


def amp_output_eh(p_b: float, norm_hbr_sq: float, system: SystemParams) -> float:
    """Amplifier RF output while re-radiating the BS signal: a_m^2*p_b*||h_br||^2 + sigma2^2."""
    return system.amp_factor**2 * p_b * norm_hbr_sq + system.sigma2_sq


def amp_output_d2d(harvested: float, t_d2d: float, norm_hsr_sq: float,
                   system: SystemParams) -> float:
    """Amplifier RF output while re-radiating the device signal."""
    if t_d2d <= 0.0:
        raise DomainError(f"t_d2d must be positive, got {t_d2d}")
    return system.amp_factor**2 * (harvested / t_d2d) * norm_hsr_sq + system.sigma2_sq


def active_power_eh(m_eh: int, p_b: float, norm_hbr_sq: float,
                    system: SystemParams) -> float:
    """Harvest-slot control power p_ct(i')."""
    if m_eh < 0:
        raise DomainError("m_eh must be non-negative")
    fixed = m_eh * (system.p_sc + system.p_dc)
    return fixed + amplifier_output_dependent(
        amp_output_eh(p_b, norm_hbr_sq, system), system.amp_efficiency)


def active_power_d2d(m_d2d: int, harvested: float, t_d2d: float,
                     norm_hsr_sq: float, system: SystemParams) -> float:
    """D2D-slot control power p_ct(i'')."""
    if m_d2d < 0:
        raise DomainError("m_d2d must be non-negative")
    fixed = m_d2d * (system.p_sc + system.p_dc)
    return fixed + amplifier_output_dependent(
        amp_output_d2d(harvested, t_d2d, norm_hsr_sq, system), system.amp_efficiency)


def total_ris_energy(schedule: Schedule, p_ss_eh: float, p_ct_eh: float,
                     p_ss_d2d: float, p_ct_d2d: float) -> float:
    """Frame energy: sum over slots of T(j) * (p_ss(j) + p_ct(j))."""
    return (schedule.t_eh * (p_ss_eh + p_ct_eh)
            + schedule.t_d2d * (p_ss_d2d + p_ct_d2d))


def breakdown(m_eh: int, k_eh: int, m_d2d: int, k_d2d: int,
              schedule: Schedule, p_b: float, harvested: float,
              norm_hbr_sq: float, norm_hsr_sq: float,
              system: SystemParams) -> PowerBreakdown:
    """Assemble the full panel power picture for one frame.

    Counts are switched-on *elements* per slot. The module scenario maps onto
    the same accounting with m(j) = m_star*Ma(j) and k(j) = k_star*Kp(j), so
    both scenarios share this code path exactly.
    """
    p_ss_eh = passive_power(k_eh, system.p_sc)
    p_ss_d2d = passive_power(k_d2d, system.p_sc)
    out_eh = amp_output_eh(p_b, norm_hbr_sq, system)
    out_d2d = amp_output_d2d(harvested, schedule.t_d2d, norm_hsr_sq, system)
    p_ct_eh = active_power_eh(m_eh, p_b, norm_hbr_sq, system)
    p_ct_d2d = active_power_d2d(m_d2d, harvested, schedule.t_d2d, norm_hsr_sq, system)
    energy = total_ris_energy(schedule, p_ss_eh, p_ct_eh, p_ss_d2d, p_ct_d2d)
    return PowerBreakdown(
        passive_eh=p_ss_eh, active_eh=p_ct_eh, amp_out_eh=out_eh,
        passive_d2d=p_ss_d2d, active_d2d=p_ct_d2d, amp_out_d2d=out_d2d,
        total_energy=energy)
