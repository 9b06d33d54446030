"""Exhaustive reference solver for small panels.

Enumerates every switch-count tuple, a dense grid over the slot split and a
dense grid over the transmit power, evaluating the exact model at each point.
Only usable for panels of at most 24 elements; exists to certify the
alternating solvers at small scale, so it shares no solver code with them
beyond the exact evaluation module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import link_rates
from .allocation import ElementAllocation, ModuleAllocation, Schedule
from .channel import ChannelRealization
from .errors import InvalidParam, NoFeasiblePoint
from .evaluate import feasibility
from .params import SystemParams

_MAX_ELEMENTS = 24
_EXP_CLAMP = 700.0
_REL = 1e-9


@dataclass(frozen=True)
class OracleResult:
    objective: float
    allocation: ElementAllocation | ModuleAllocation
    schedule: Schedule
    p_b: float
    n_feasible: int


def _guard(system: SystemParams, n_time: int, n_power: int) -> None:
    if system.n_total > _MAX_ELEMENTS:
        raise InvalidParam(
            f"exhaustive search is limited to {_MAX_ELEMENTS} elements, "
            f"got {system.n_total}")
    if n_time < 2 or n_power < 2:
        raise InvalidParam("grids need at least two points")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.clip(z, -_EXP_CLAMP, _EXP_CLAMP)
    return 1.0 / (1.0 + np.exp(-z))


def _count_tuples(limit_active: int, limit_passive: int, w_active: int,
                  w_passive: int, cap: int):
    """All (act_eh, pas_eh, act_d2d, pas_d2d) with the shared-surface cap.

    Totals never appear in the cost, so they are fixed to the per-slot
    maxima; the cap applies to those maxima with the given element weights.
    """
    r_a = np.arange(limit_active + 1)
    r_p = np.arange(limit_passive + 1)
    a1, p1, a2, p2 = np.meshgrid(r_a, r_p, r_a, r_p, indexing="ij")
    a1, p1, a2, p2 = (v.ravel() for v in (a1, p1, a2, p2))
    keep = (np.maximum(a1, a2) * w_active + np.maximum(p1, p2) * w_passive) <= cap
    return a1[keep], p1[keep], a2[keep], p2[keep]


def _power_floor(system: SystemParams, t_eh: float, t_d2d: float,
                 g1_sq: np.ndarray, g2_sq: np.ndarray,
                 sigma_eff: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Smallest transmit power meeting harvest and rate floors, per tuple."""
    theta = link_rates.snr_floor(system.rate_thresh_d2d)
    with np.errstate(divide="ignore", invalid="ignore"):
        e_req = np.maximum(system.e_min, theta * sigma_eff * t_d2d / g2_sq)
        ratio = system.harvest_max * t_eh / e_req - 1.0
        reachable = ratio > 0.0
        r = system.y2 - np.log(np.where(reachable, ratio, 1.0)) / system.y1
        p_req = system.sigma1_sq * np.maximum(r, 0.0) / (system.zeta * g1_sq)
    p_req = np.maximum(p_req, system.p_b_min)
    return p_req, reachable


def brute_force_element(system: SystemParams, realization: ChannelRealization,
                        n_time: int = 200, n_power: int = 200) -> OracleResult:
    """Grid-exhaustive optimum of the per-element scenario.

    For fixed counts and slot split every constraint is monotone in the
    transmit power, so the cheapest feasible power is the requirement
    snapped up to the grid.  Ties go to the earliest (slot, tuple) index.
    """
    _guard(system, n_time, n_power)
    a = system.amp_factor
    n = system.n_total
    m1, k1, m2, k2 = _count_tuples(n, n, 1, 1, n)

    g1 = realization.h_bs + realization.h1 * (a * m1 + k1)
    g1_sq = g1 * g1
    g2_sq = (realization.h_sd + realization.h2 * (a * m2 + k2)) ** 2
    sigma_e = (system.sigma2_sq * (a * a * m2 + k2)
               * realization.norm_hrd_sq / n + system.sigma1_sq)
    p_act = system.p_sc + system.p_dc
    c_eh = k1 * system.p_sc + m1 * p_act
    c_d2d = k2 * system.p_sc + m2 * p_act

    t_grid = np.linspace(system.t_slot_min, system.t_frame - system.t_slot_min, n_time)
    p_grid = np.linspace(system.p_b_min, system.p_b_max, n_power)
    theta = link_rates.snr_floor(system.rate_thresh_d2d)
    v = system.amp_efficiency

    best = None
    n_feasible = 0
    for ti, t_eh in enumerate(t_grid):
        t_d2d = system.t_frame - t_eh
        p_req, mask = _power_floor(system, t_eh, t_d2d, g1_sq, g2_sq, sigma_e)
        idx = np.searchsorted(p_grid, p_req * (1.0 - 1e-12))
        mask &= idx < n_power
        p = p_grid[np.minimum(idx, n_power - 1)]
        p_nl = system.zeta * p * g1_sq / system.sigma1_sq
        e_nl = system.harvest_max * t_eh * _sigmoid(system.y1 * (p_nl - system.y2))
        mask &= e_nl >= system.e_min * (1.0 - _REL)
        mask &= e_nl * g2_sq >= theta * sigma_e * t_d2d * (1.0 - _REL)
        obj = (t_eh * (c_eh + (a * a * p * realization.norm_hbr_sq
                               + system.sigma2_sq) / v)
               + t_d2d * (c_d2d + system.sigma2_sq / v)
               + a * a * e_nl * realization.norm_hsr_sq / v)
        obj = np.where(mask, obj, np.inf)
        n_feasible += int(np.count_nonzero(mask))
        j = int(np.argmin(obj))
        if math.isfinite(obj[j]) and (best is None or obj[j] < best[0]):
            best = (float(obj[j]), ti, j, float(p[j]))

    if best is None:
        raise NoFeasiblePoint("no grid point satisfies every constraint")
    obj_val, ti, j, p_b = best
    alloc = ElementAllocation(m=int(max(m1[j], m2[j])), k=int(max(k1[j], k2[j])),
                              m_eh=int(m1[j]), k_eh=int(k1[j]),
                              m_d2d=int(m2[j]), k_d2d=int(k2[j]))
    schedule = Schedule(t_eh=float(t_grid[ti]),
                        t_d2d=system.t_frame - float(t_grid[ti]))
    rep = feasibility(alloc, schedule, p_b, realization, system)
    assert rep.ok, "oracle winner must pass the exact feasibility check"
    return OracleResult(objective=obj_val, allocation=alloc, schedule=schedule,
                        p_b=p_b, n_feasible=n_feasible)


def brute_force_module(system: SystemParams, realization: ChannelRealization,
                       m_star: int, k_star: int, n_time: int = 200,
                       n_power: int = 200) -> OracleResult:
    """Grid-exhaustive optimum of the module scenario.

    Causality is not monotone in the transmit power (both link rates grow
    with it), so for each tuple and slot split the power grid is scanned
    upward from the harvest/rate floor until causality holds; the scan stays
    exact because cost strictly increases with power.
    """
    _guard(system, n_time, n_power)
    if m_star < 1 or k_star < 1:
        raise InvalidParam("module sizes must be at least 1")
    a = system.amp_factor
    n = system.n_total
    ma1, kp1, ma2, kp2 = _count_tuples(n // m_star, n // k_star, m_star, k_star, n)

    l1 = a * m_star * ma1 + k_star * kp1
    l2 = a * m_star * ma2 + k_star * kp2
    g1 = realization.h_bs + realization.h3 * l1
    g1_sq = g1 * g1
    g2_sq = (realization.h_sd + realization.h4 * l2) ** 2
    sigma_m1 = system.sigma2_sq * l1 * realization.norm_hrs_sq + system.sigma1_sq
    sigma_m2 = system.sigma2_sq * l2 * realization.norm_hrd_sq + system.sigma1_sq
    p_act = system.p_sc + system.p_dc
    c_eh = kp1 * k_star * system.p_sc + ma1 * m_star * p_act
    c_d2d = kp2 * k_star * system.p_sc + ma2 * m_star * p_act

    t_grid = np.linspace(system.t_slot_min, system.t_frame - system.t_slot_min, n_time)
    p_grid = np.linspace(system.p_b_min, system.p_b_max, n_power)
    theta = link_rates.snr_floor(system.rate_thresh_d2d)
    v = system.amp_efficiency
    ln2 = math.log(2.0)

    # Slot-independent precomputation over (tuple, power).
    pn = system.zeta * p_grid[None, :] * g1_sq[:, None] / system.sigma1_sq
    s_frac = _sigmoid(system.y1 * (pn - system.y2))
    spec_b = np.log1p(p_grid[None, :] * g1_sq[:, None] / sigma_m1[:, None]) / ln2

    best = None
    n_feasible = 0
    for ti, t_eh in enumerate(t_grid):
        t_d2d = system.t_frame - t_eh
        p_req, reachable = _power_floor(system, t_eh, t_d2d, g1_sq, g2_sq, sigma_m2)
        idx = np.searchsorted(p_grid, p_req * (1.0 - 1e-12))
        feas = np.zeros(len(l1), dtype=bool)
        active = reachable & (idx < n_power)
        idx = np.where(active, idx, 0)
        while np.any(active):
            rows = np.flatnonzero(active)
            ii = idx[rows]
            e_nl = system.harvest_max * t_eh * s_frac[rows, ii]
            ok = e_nl >= system.e_min * (1.0 - _REL)
            ok &= e_nl * g2_sq[rows] >= theta * sigma_m2[rows] * t_d2d * (1.0 - _REL)
            bits_b = t_eh * system.bw2 * spec_b[rows, ii]
            bits_d = (t_d2d * system.bw3
                      * np.log1p(e_nl * g2_sq[rows] / (t_d2d * sigma_m2[rows])) / ln2)
            ok &= bits_d - bits_b >= -_REL * np.maximum(1.0, bits_b)
            feas[rows[ok]] = True
            active[rows[ok]] = False
            adv = rows[~ok]
            idx[adv] += 1
            active[adv] = idx[adv] < n_power
        rows = np.flatnonzero(feas)
        if rows.size == 0:
            continue
        n_feasible += int(rows.size)
        ii = idx[rows]
        p = p_grid[ii]
        e_nl = system.harvest_max * t_eh * s_frac[rows, ii]
        obj = (t_eh * (c_eh[rows] + (a * a * p * realization.norm_hbr_sq
                                     + system.sigma2_sq) / v)
               + t_d2d * (c_d2d[rows] + system.sigma2_sq / v)
               + a * a * e_nl * realization.norm_hsr_sq / v)
        j = int(np.argmin(obj))
        if best is None or obj[j] < best[0]:
            best = (float(obj[j]), ti, int(rows[j]), float(p[j]))

    if best is None:
        raise NoFeasiblePoint("no grid point satisfies every constraint")
    obj_val, ti, j, p_b = best
    alloc = ModuleAllocation(m_star=m_star, k_star=k_star,
                             ma=int(max(ma1[j], ma2[j])), kp=int(max(kp1[j], kp2[j])),
                             ma_eh=int(ma1[j]), kp_eh=int(kp1[j]),
                             ma_d2d=int(ma2[j]), kp_d2d=int(kp2[j]))
    schedule = Schedule(t_eh=float(t_grid[ti]),
                        t_d2d=system.t_frame - float(t_grid[ti]))
    rep = feasibility(alloc, schedule, p_b, realization, system)
    assert rep.ok, "oracle winner must pass the exact feasibility check"
    return OracleResult(objective=obj_val, allocation=alloc, schedule=schedule,
                        p_b=p_b, n_feasible=n_feasible)
