"""Exact (non-linearized) evaluation of a candidate solution.

Every accepted iterate, every rounding step and the brute-force oracle all
judge feasibility and cost through these functions, so the solvers and their
reference implementations can never drift apart on the model definition.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import harvesting, link_rates, ris_power
from .allocation import ElementAllocation, ModuleAllocation, Schedule
from .channel import ChannelRealization
from .params import SystemParams

REL_TOL = 1e-9


@dataclass(frozen=True)
class FeasibilityReport:
    """Constraint slacks of one candidate; ok means every slack >= -REL_TOL (relative)."""

    ok: bool
    harvest_slack: float      # e_nl - e_min, joules
    rate_slack: float         # spectral efficiency margin, bits/s/Hz
    causality_slack: float    # t_d2d*R_d2d - t_eh*R_bs, bits (0 when not checked)
    harvested: float
    rate_d2d: float
    rate_bs: float


def _element_counts(alloc: ElementAllocation | ModuleAllocation) -> tuple[int, int, int, int]:
    """Switched-on elements per slot, for either scenario."""
    if isinstance(alloc, ModuleAllocation):
        m_eh, k_eh = alloc.elements_eh()
        m_d2d, k_d2d = alloc.elements_d2d()
        return m_eh, k_eh, m_d2d, k_d2d
    return alloc.m_eh, alloc.k_eh, alloc.m_d2d, alloc.k_d2d


def harvest_exact(alloc, schedule: Schedule, p_b: float,
                  realization: ChannelRealization, system: SystemParams):
    """HarvestResult at a candidate point, using the scenario's cascade scalar."""
    if isinstance(alloc, ModuleAllocation):
        cascade = alloc.l_eh(system.amp_factor) * realization.h3
    else:
        cascade = alloc.gain_eh(system.amp_factor) * realization.h1
    return harvesting.evaluate(p_b, realization.h_bs, cascade, schedule.t_eh, system)


def objective_exact(alloc, schedule: Schedule, p_b: float,
                    realization: ChannelRealization, system: SystemParams) -> float:
    """Panel energy over the frame, joules, with the exact harvest in the amplifier term."""
    m_eh, k_eh, m_d2d, k_d2d = _element_counts(alloc)
    harvested = harvest_exact(alloc, schedule, p_b, realization, system).energy
    bd = ris_power.breakdown(m_eh, k_eh, m_d2d, k_d2d, schedule, p_b, harvested,
                             realization.norm_hbr_sq, realization.norm_hsr_sq, system)
    return bd.total_energy


def rates_exact(alloc, schedule: Schedule, p_b: float,
                realization: ChannelRealization, system: SystemParams) -> tuple[float, float]:
    """(rate_bs, rate_d2d) in bits/s with the scenario's effective noises."""
    harvested = harvest_exact(alloc, schedule, p_b, realization, system).energy
    if isinstance(alloc, ModuleAllocation):
        l_eh = alloc.l_eh(system.amp_factor)
        l_d2d = alloc.l_d2d(system.amp_factor)
        s1 = link_rates.sigma_m1_sq(l_eh, realization, system)
        s2 = link_rates.sigma_m2_sq(l_d2d, realization, system)
        r_bs = link_rates.bs_rate(p_b, realization.h_bs, l_eh * realization.h3, s1, system.bw2)
        r_d2d = link_rates.d2d_rate(harvested, schedule.t_d2d, realization.h_sd,
                                    l_d2d * realization.h4, s2, system.bw3)
    else:
        m_eh, k_eh, m_d2d, k_d2d = _element_counts(alloc)
        s1 = (system.sigma2_sq * (system.amp_factor**2 * m_eh + k_eh)
              * realization.norm_hrs_sq / realization.n_elements + system.sigma1_sq)
        s2 = link_rates.effective_noise_d2d(m_d2d, k_d2d, realization, system)
        gain_eh = alloc.gain_eh(system.amp_factor) * realization.h1
        gain_d2d = alloc.gain_d2d(system.amp_factor) * realization.h2
        r_bs = link_rates.bs_rate(p_b, realization.h_bs, gain_eh, s1, system.bw2)
        r_d2d = link_rates.d2d_rate(harvested, schedule.t_d2d, realization.h_sd,
                                    gain_d2d, s2, system.bw1)
    return r_bs, r_d2d


def feasibility(alloc, schedule: Schedule, p_b: float,
                realization: ChannelRealization, system: SystemParams,
                check_causality: bool | None = None) -> FeasibilityReport:
    """Exact constraint check for either scenario.

    The element scenario checks harvest and the D2D rate floor; the module
    scenario additionally checks information causality (default; pass
    check_causality explicitly to override).
    """
    is_module = isinstance(alloc, ModuleAllocation)
    if check_causality is None:
        check_causality = is_module

    harvested = harvest_exact(alloc, schedule, p_b, realization, system).energy
    rate_bs, rate_d2d = rates_exact(alloc, schedule, p_b, realization, system)
    bw_d2d = system.bw3 if is_module else system.bw1

    harvest_slack = harvested - system.e_min
    rate_slack = rate_d2d / bw_d2d - system.rate_thresh_d2d
    harvest_ok = harvest_slack >= -REL_TOL * max(system.e_min, harvested)
    rate_ok = rate_slack >= -REL_TOL * max(1.0, system.rate_thresh_d2d)

    if check_causality:
        rr = link_rates.causality_satisfied(schedule, rate_bs, rate_d2d)
        causality_slack, causality_ok = rr.causality_slack, rr.causality_ok
    else:
        causality_slack, causality_ok = 0.0, True

    caps_ok = True
    try:
        alloc.check_cap(system.n_total)
        schedule.check_frame(system.t_frame)
    except Exception:
        caps_ok = False
    bounds_ok = (system.p_b_min * (1 - REL_TOL) <= p_b <= system.p_b_max * (1 + REL_TOL)
                 and min(schedule.t_eh, schedule.t_d2d) >= system.t_slot_min * (1 - REL_TOL))

    return FeasibilityReport(
        ok=harvest_ok and rate_ok and causality_ok and caps_ok and bounds_ok,
        harvest_slack=harvest_slack,
        rate_slack=rate_slack,
        causality_slack=causality_slack,
        harvested=harvested,
        rate_d2d=rate_d2d,
        rate_bs=rate_bs,
    )
