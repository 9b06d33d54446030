"""No-surface reference: direct links only, every switch off.

Same frame optimization with the surface terms removed.  When the direct
link cannot reach the rate floor at all (the situation the surface exists
to fix), the baseline reports the largest rate the direct link can achieve
while still meeting the harvest target, so rate comparisons stay defined.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import harvesting, link_rates
from .allocation import Schedule
from .channel import ChannelRealization
from .errors import NoFeasiblePoint
from .params import SystemParams

_GRID_POINTS = 2001
_EXP_CLAMP = 700.0


@dataclass(frozen=True)
class BaselineResult:
    schedule: Schedule
    p_b: float
    harvested: float
    rate_bs: float
    rate_d2d: float
    rate_floor_met: bool


def _sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.clip(z, -_EXP_CLAMP, _EXP_CLAMP)
    return 1.0 / (1.0 + np.exp(-z))


def solve_baseline(system: SystemParams, realization: ChannelRealization,
                   n_time: int = _GRID_POINTS) -> BaselineResult:
    """Cheapest feasible direct-link operation on a deterministic grid.

    Primary: meet harvest and rate floors with the smallest transmit power,
    then the shortest harvest slot.  Fallback when the rate floor is out of
    reach: meet the harvest floor and maximize the achievable rate.
    """
    h_bs, h_sd = realization.h_bs, realization.h_sd
    g1_sq = h_bs * h_bs
    g2_sq = h_sd * h_sd
    theta = link_rates.snr_floor(system.rate_thresh_d2d)

    t_grid = np.linspace(system.t_slot_min, system.t_frame - system.t_slot_min,
                         n_time)
    t_d2d = system.t_frame - t_grid
    with np.errstate(divide="ignore", invalid="ignore"):
        e_req = np.maximum(system.e_min, theta * system.sigma1_sq * t_d2d / g2_sq)
        ratio = system.harvest_max * t_grid / e_req - 1.0
        ok = ratio > 0.0
        r = system.y2 - np.log(np.where(ok, ratio, 1.0)) / system.y1
        p_req = np.maximum(system.sigma1_sq * np.maximum(r, 0.0)
                           / (system.zeta * g1_sq), system.p_b_min)
    ok &= p_req <= system.p_b_max * (1.0 + 1e-12)

    if bool(np.any(ok)):
        p_masked = np.where(ok, p_req, np.inf)
        i = int(np.argmin(p_masked))  # first index at the minimum: smallest t_eh
        p_b = float(min(p_masked[i], system.p_b_max))
        schedule = Schedule(t_eh=float(t_grid[i]), t_d2d=float(t_d2d[i]))
        floor_met = True
    else:
        # Rate floor unattainable without the surface: report the best the
        # direct link can do, harvest target still enforced, full power.
        p_b = system.p_b_max
        p_lin = system.zeta * p_b * g1_sq / system.sigma1_sq
        s = float(_sigmoid(np.asarray(system.y1 * (p_lin - system.y2))))
        e_nl = system.harvest_max * s * t_grid
        feas = e_nl >= system.e_min * (1.0 - 1e-12)
        if not bool(np.any(feas)):
            raise NoFeasiblePoint("direct links cannot even meet the harvest "
                                  "target at full power")
        snr = np.where(feas, (e_nl / t_d2d) * g2_sq / system.sigma1_sq, -1.0)
        i = int(np.argmax(snr))
        schedule = Schedule(t_eh=float(t_grid[i]), t_d2d=float(t_d2d[i]))
        floor_met = False

    hr = harvesting.evaluate(p_b, h_bs, 0.0, schedule.t_eh, system)
    rate_bs = link_rates.bs_rate(p_b, h_bs, 0.0, system.sigma1_sq, system.bw2)
    rate_d2d = link_rates.d2d_rate(hr.energy, schedule.t_d2d, h_sd, 0.0,
                                   system.sigma1_sq, system.bw1)
    return BaselineResult(schedule=schedule, p_b=p_b, harvested=hr.energy,
                          rate_bs=rate_bs, rate_d2d=rate_d2d,
                          rate_floor_met=floor_met)
