"""Convexified subproblems of the alternating optimization.

Each outer iteration freezes two of the three variable blocks (switch counts,
slot split, base-station power) and solves for the third:

  * count step: LP over relaxed counts, non-convex rows replaced by
    linearizations anchored at the previous iterate,
  * slot step: one-dimensional LP in the harvest slot length,
  * power step: closed-form interval in the transmit power.

Builders return inspectable problem objects so the anchored rows can be
checked for tangency against the exact constraint surfaces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import harvesting, link_rates, simplex
from .allocation import ElementAllocation, ModuleAllocation, Schedule
from .channel import ChannelRealization
from .errors import DomainError, Infeasible, InfeasibleLinearization, RoundingFailed
from .evaluate import feasibility, objective_exact
from .params import SystemParams

_CEIL_EPS = 1e-9


@dataclass(frozen=True)
class FeasiblePoint:
    """Anchor around which the count step is linearized.

    For the element scenario the four count fields are switched-on elements
    per slot; for the module scenario they are connected modules per slot.
    """

    active_eh: float
    passive_eh: float
    active_d2d: float
    passive_d2d: float
    t_eh: float
    p_b: float

    def counts(self) -> tuple[float, float, float, float]:
        return (self.active_eh, self.passive_eh, self.active_d2d, self.passive_d2d)


@dataclass(frozen=True)
class LinearConstraint:
    """Affine surface offset + coeffs @ x compared against floor.

    exact, when present, is the non-linear surface this row approximates; the
    two must agree at the anchor point (value tangency).
    """

    label: str
    coeffs: tuple[float, ...]
    offset: float
    floor: float
    sense: str  # "ge" or "le"
    exact: Callable[[np.ndarray], float] | None = None

    def linear_value(self, x: Sequence[float]) -> float:
        return self.offset + float(np.dot(self.coeffs, x))

    def as_ub_row(self) -> tuple[np.ndarray, float]:
        """Rewrite as row @ x <= rhs, normalized to unit row scale."""
        c = np.asarray(self.coeffs, dtype=float)
        if self.sense == "ge":
            row, rhs = -c, self.offset - self.floor
        else:
            row, rhs = c, self.floor - self.offset
        scale = max(float(np.max(np.abs(row))), abs(rhs), 1.0e-300)
        return row / scale, rhs / scale


@dataclass
class SubproblemLP:
    var_names: tuple[str, ...]
    cost: np.ndarray
    cost_offset: float
    constraints: list[LinearConstraint]
    bounds: list[tuple[float, float]]

    def solve(self) -> np.ndarray:
        rows, rhs = [], []
        for con in self.constraints:
            r, b = con.as_ub_row()
            rows.append(r)
            rhs.append(b)
        a_ub = np.vstack(rows) if rows else None
        b_ub = np.asarray(rhs) if rows else None
        c = self.cost.copy()
        cscale = float(np.max(np.abs(c)))
        if cscale > 0:
            c = c / cscale
        return simplex.solve_lp(c, a_ub=a_ub, b_ub=b_ub, bounds=self.bounds)


def _sigma_e_element(m_d2d: float, k_d2d: float, realization: ChannelRealization,
                     system: SystemParams) -> float:
    a = system.amp_factor
    return (system.sigma2_sq * (a * a * m_d2d + k_d2d)
            * realization.norm_hrd_sq / realization.n_elements + system.sigma1_sq)


def _harvest_floor(system: SystemParams, t_eh: float, p_b: float) -> float:
    """Required squared cascade amplitude so the harvest target is reachable."""
    p_req = harvesting.required_receive_power(
        system.e_min, t_eh, system.harvest_max, system.y1, system.y2)
    return system.sigma1_sq * p_req / (system.zeta * p_b)


def _linear_harvest_row(h_direct: float, h_cascade: float, gain_anchor: float,
                        per_active: float, floor: float, idx_active: int,
                        idx_passive: int, n_vars: int,
                        exact: Callable[[np.ndarray], float]) -> LinearConstraint:
    """Anchored product expansion of (h_direct + h_cascade*G)^2 >= floor.

    The cross term keeps one factor at the anchor: G^2 -> G*G_anchor, which
    matches the exact surface in value at the anchor and is linear in G.
    """
    slope = 2.0 * h_direct * h_cascade + h_cascade * h_cascade * gain_anchor
    coeffs = [0.0] * n_vars
    coeffs[idx_active] = slope * per_active
    coeffs[idx_passive] = slope
    return LinearConstraint(label="harvest", coeffs=tuple(coeffs),
                            offset=h_direct * h_direct, floor=floor,
                            sense="ge", exact=exact)


def _check_linearization_headroom(row: LinearConstraint, x_max: np.ndarray) -> None:
    if row.linear_value(x_max) < row.floor:
        raise InfeasibleLinearization(
            f"{row.label} row cannot be met even with every switch on")


def build_p1a(system: SystemParams, realization: ChannelRealization,
              anchor: FeasiblePoint) -> SubproblemLP:
    """Count step of the element scenario.

    Variables: [m, k, m_eh, k_eh, m_d2d, k_d2d] (relaxed to reals).
    """
    a = system.amp_factor
    n = system.n_total
    t_eh, t_d2d = anchor.t_eh, system.t_frame - anchor.t_eh
    p_b = anchor.p_b
    h_bs, h_sd = realization.h_bs, realization.h_sd
    h1, h2 = realization.h1, realization.h2

    g1f = a * anchor.active_eh + anchor.passive_eh
    g2f = a * anchor.active_d2d + anchor.passive_d2d

    def gain_eh(x: np.ndarray) -> float:
        return a * x[2] + x[3]

    def gain_d2d(x: np.ndarray) -> float:
        return a * x[4] + x[5]

    # Harvest: (h_bs + h1*G_eh)^2 >= floor, anchored.
    floor1 = _harvest_floor(system, t_eh, p_b)
    harvest_row = _linear_harvest_row(
        h_bs, h1, g1f, a, floor1, idx_active=2, idx_passive=3, n_vars=6,
        exact=lambda x: (h_bs + h1 * gain_eh(x)) ** 2)

    # D2D rate: e_nl(G_eh) * (h_sd + h2*G_d2d)^2 >= theta * sigma_e^2 * t_d2d,
    # with the effective noise frozen at the anchor counts.  First-order
    # Taylor expansion of the exact left side around the anchor gains.
    def e_nl(g_eh: float) -> float:
        p_lin = system.zeta * p_b * (h_bs + h1 * g_eh) ** 2 / system.sigma1_sq
        s = harvesting.sigmoid_fraction(p_lin, system.y1, system.y2)
        return system.harvest_max * t_eh * s

    def rate_lhs(x: np.ndarray) -> float:
        return e_nl(gain_eh(x)) * (h_sd + h2 * gain_d2d(x)) ** 2

    theta = link_rates.snr_floor(system.rate_thresh_d2d)
    sigma_e_f = _sigma_e_element(anchor.active_d2d, anchor.passive_d2d, realization, system)
    floor2 = theta * sigma_e_f * t_d2d

    p_lin_f = system.zeta * p_b * (h_bs + h1 * g1f) ** 2 / system.sigma1_sq
    s_f = harvesting.sigmoid_fraction(p_lin_f, system.y1, system.y2)
    e_f = system.harvest_max * t_eh * s_f
    b_f = (h_sd + h2 * g2f) ** 2
    dp_dg1 = 2.0 * system.zeta * p_b * h1 * (h_bs + h1 * g1f) / system.sigma1_sq
    de_dg1 = (system.harvest_max * t_eh
              * harvesting.sigmoid_slope(p_lin_f, system.y1, system.y2) * dp_dg1)
    df_dg1 = de_dg1 * b_f
    df_dg2 = e_f * 2.0 * (h_sd + h2 * g2f) * h2
    rate_coeffs = (0.0, 0.0, df_dg1 * a, df_dg1, df_dg2 * a, df_dg2)
    rate_offset = e_f * b_f - df_dg1 * g1f - df_dg2 * g2f
    rate_row = LinearConstraint(label="d2d_rate", coeffs=rate_coeffs,
                                offset=rate_offset, floor=floor2, sense="ge",
                                exact=rate_lhs)

    x_max = np.array([n, n, n, n, n, n], dtype=float)
    _check_linearization_headroom(harvest_row, x_max)
    _check_linearization_headroom(rate_row, x_max)

    cons = [harvest_row, rate_row]
    # Per-slot counts cannot exceed owned counts; total fits on the surface.
    for slot_idx, total_idx, label in ((2, 0, "m_eh<=m"), (4, 0, "m_d2d<=m"),
                                       (3, 1, "k_eh<=k"), (5, 1, "k_d2d<=k")):
        coeffs = [0.0] * 6
        coeffs[slot_idx] = 1.0
        coeffs[total_idx] = -1.0
        cons.append(LinearConstraint(label=label, coeffs=tuple(coeffs),
                                     offset=0.0, floor=0.0, sense="le"))
    cons.append(LinearConstraint(label="capacity", coeffs=(1, 1, 0, 0, 0, 0),
                                 offset=0.0, floor=float(n), sense="le"))

    p_act = system.p_sc + system.p_dc
    cost = np.array([0.0, 0.0, t_eh * p_act, t_eh * system.p_sc,
                     t_d2d * p_act, t_d2d * system.p_sc])
    amp_eh = (a * a * p_b * realization.norm_hbr_sq + system.sigma2_sq) / system.amp_efficiency
    cost_offset = (t_eh * amp_eh + t_d2d * system.sigma2_sq / system.amp_efficiency
                   + a * a * e_f * realization.norm_hsr_sq / system.amp_efficiency)

    return SubproblemLP(var_names=("m", "k", "m_eh", "k_eh", "m_d2d", "k_d2d"),
                        cost=cost, cost_offset=cost_offset, constraints=cons,
                        bounds=[(0.0, float(n))] * 6)


def build_p2a(system: SystemParams, realization: ChannelRealization,
              anchor: FeasiblePoint, m_star: int, k_star: int) -> SubproblemLP:
    """Count step of the module scenario.

    Variables: [ma, kp, ma_eh, kp_eh, ma_d2d, kp_d2d] (connected module
    counts, relaxed).  Adds the information-causality row, rewritten as a
    bound on the D2D-slot module gain.
    """
    a = system.amp_factor
    n = system.n_total
    t_eh, t_d2d = anchor.t_eh, system.t_frame - anchor.t_eh
    p_b = anchor.p_b
    h_bs, h_sd = realization.h_bs, realization.h_sd
    h3, h4 = realization.h3, realization.h4

    per_active = a * m_star  # gain contributed by one amplifying module
    l1f = per_active * anchor.active_eh + k_star * anchor.passive_eh
    l2f = per_active * anchor.active_d2d + k_star * anchor.passive_d2d

    def l_eh(x: np.ndarray) -> float:
        return per_active * x[2] + k_star * x[3]

    def l_d2d(x: np.ndarray) -> float:
        return per_active * x[4] + k_star * x[5]

    floor1 = _harvest_floor(system, t_eh, p_b)
    slope1 = 2.0 * h_bs * h3 + h3 * h3 * l1f
    harvest_row = LinearConstraint(
        label="harvest",
        coeffs=(0.0, 0.0, slope1 * per_active, slope1 * k_star, 0.0, 0.0),
        offset=h_bs * h_bs, floor=floor1, sense="ge",
        exact=lambda x: (h_bs + h3 * l_eh(x)) ** 2)

    def e_nl(l1: float) -> float:
        p_lin = system.zeta * p_b * (h_bs + h3 * l1) ** 2 / system.sigma1_sq
        s = harvesting.sigmoid_fraction(p_lin, system.y1, system.y2)
        return system.harvest_max * t_eh * s

    theta = link_rates.snr_floor(system.rate_thresh_d2d)
    sigma2f = link_rates.sigma_m2_sq(l2f, realization, system)
    floor2 = theta * sigma2f * t_d2d

    p_lin_f = system.zeta * p_b * (h_bs + h3 * l1f) ** 2 / system.sigma1_sq
    s_f = harvesting.sigmoid_fraction(p_lin_f, system.y1, system.y2)
    e_f = system.harvest_max * t_eh * s_f
    b_f = (h_sd + h4 * l2f) ** 2
    dp_dl1 = 2.0 * system.zeta * p_b * h3 * (h_bs + h3 * l1f) / system.sigma1_sq
    de_dl1 = (system.harvest_max * t_eh
              * harvesting.sigmoid_slope(p_lin_f, system.y1, system.y2) * dp_dl1)
    df_dl1 = de_dl1 * b_f
    df_dl2 = e_f * 2.0 * (h_sd + h4 * l2f) * h4
    rate_row = LinearConstraint(
        label="d2d_rate",
        coeffs=(0.0, 0.0, df_dl1 * per_active, df_dl1 * k_star,
                df_dl2 * per_active, df_dl2 * k_star),
        offset=e_f * b_f - df_dl1 * l1f - df_dl2 * l2f,
        floor=floor2, sense="ge",
        exact=lambda x: e_nl(l_eh(x)) * (h_sd + h4 * l_d2d(x)) ** 2)

    # Causality, rewritten as a floor on the D2D module gain.  With the EH
    # block frozen at the anchor the rewrite is exact, so the row is tangent.
    f11 = t_d2d * system.bw3 / (t_eh * system.bw2)

    def required_l2(l1: float, sigma_m2: float) -> float:
        sigma_m1 = link_rates.sigma_m1_sq(l1, realization, system)
        snr_b = p_b * (h_bs + h3 * l1) ** 2 / sigma_m1
        need = (1.0 + snr_b) ** (1.0 / f11) - 1.0
        if need <= 0.0:
            return 0.0
        f12 = e_nl(l1) / (sigma_m2 * t_d2d)
        return max(0.0, (math.sqrt(need / f12) - h_sd) / h4)

    l2_req = required_l2(l1f, sigma2f)
    causality_row = LinearConstraint(
        label="causality",
        coeffs=(0.0, 0.0, 0.0, 0.0, per_active, k_star),
        offset=-l2_req, floor=0.0, sense="ge",
        exact=lambda x: l_d2d(x) - required_l2(
            l_eh(x), link_rates.sigma_m2_sq(l_d2d(x), realization, system)))

    ma_cap = float(n // m_star)
    kp_cap = float(n // k_star)
    x_max = np.array([ma_cap, kp_cap, ma_cap, kp_cap, ma_cap, kp_cap])
    _check_linearization_headroom(harvest_row, x_max)
    _check_linearization_headroom(rate_row, x_max)
    _check_linearization_headroom(causality_row, x_max)

    cons = [harvest_row, rate_row, causality_row]
    for slot_idx, total_idx, label in ((2, 0, "ma_eh<=ma"), (4, 0, "ma_d2d<=ma"),
                                       (3, 1, "kp_eh<=kp"), (5, 1, "kp_d2d<=kp")):
        coeffs = [0.0] * 6
        coeffs[slot_idx] = 1.0
        coeffs[total_idx] = -1.0
        cons.append(LinearConstraint(label=label, coeffs=tuple(coeffs),
                                     offset=0.0, floor=0.0, sense="le"))
    cons.append(LinearConstraint(label="capacity",
                                 coeffs=(float(m_star), float(k_star), 0, 0, 0, 0),
                                 offset=0.0, floor=float(n), sense="le"))

    p_act = system.p_sc + system.p_dc
    cost = np.array([0.0, 0.0, t_eh * m_star * p_act, t_eh * k_star * system.p_sc,
                     t_d2d * m_star * p_act, t_d2d * k_star * system.p_sc])
    cost_offset = (t_eh * (a * a * p_b * realization.norm_hbr_sq + system.sigma2_sq)
                   / system.amp_efficiency
                   + t_d2d * system.sigma2_sq / system.amp_efficiency
                   + a * a * e_f * realization.norm_hsr_sq / system.amp_efficiency)

    return SubproblemLP(var_names=("ma", "kp", "ma_eh", "kp_eh", "ma_d2d", "kp_d2d"),
                        cost=cost, cost_offset=cost_offset, constraints=cons,
                        bounds=[(0.0, ma_cap), (0.0, kp_cap), (0.0, ma_cap),
                                (0.0, kp_cap), (0.0, ma_cap), (0.0, kp_cap)])


@dataclass(frozen=True)
class SlotProgram:
    """One-dimensional LP in the harvest slot length t_eh.

    Feasible interval [t_lo, t_hi]; the cost is affine with the given slope,
    so the optimum sits at a corner (t_lo on non-negative slope).
    """

    t_lo: float
    t_hi: float
    cost_slope: float
    t_frame: float

    def solve(self) -> Schedule:
        # a whisker of float error on a singleton interval is not emptiness
        tol = 1e-12 * max(1.0, abs(self.t_hi))
        if self.t_lo > self.t_hi + tol:
            raise Infeasible("empty slot interval: "
                             f"lo={self.t_lo:.6g} > hi={self.t_hi:.6g}")
        t_eh = self.t_lo if self.cost_slope >= 0.0 else self.t_hi
        t_eh = min(t_eh, self.t_hi)
        return Schedule(t_eh=t_eh, t_d2d=self.t_frame - t_eh)


def _slot_bounds_common(system: SystemParams, s_frac: float, g2_sq: float,
                        sigma_eff: float) -> tuple[float, float]:
    """Lower bounds on t_eh from the harvest floor and the D2D rate floor."""
    y_s = system.harvest_max * s_frac
    if y_s <= 0.0:
        raise Infeasible("zero harvest fraction: no slot split can harvest e_min")
    lo_harvest = system.e_min / y_s
    theta = link_rates.snr_floor(system.rate_thresh_d2d)
    denom = y_s * g2_sq + theta * sigma_eff
    lo_rate = theta * sigma_eff * system.t_frame / denom if denom > 0 else math.inf
    return lo_harvest, lo_rate


def _slot_cost_slope(system: SystemParams, m_eh: int, k_eh: int, m_d2d: int,
                     k_d2d: int, p_b: float, s_frac: float,
                     realization: ChannelRealization) -> float:
    """d(energy)/dt_eh at fixed counts, power and harvest fraction.

    The relay energy in the D2D slot contains the harvested energy through
    the amplifier input, and e_nl = Y*s*t_eh is linear in t_eh here.
    """
    a = system.amp_factor
    p_act = system.p_sc + system.p_dc
    per_eh = (k_eh * system.p_sc + m_eh * p_act
              + (a * a * p_b * realization.norm_hbr_sq + system.sigma2_sq)
              / system.amp_efficiency)
    per_d2d = (k_d2d * system.p_sc + m_d2d * p_act
               + system.sigma2_sq / system.amp_efficiency)
    amp_energy_slope = (a * a * system.harvest_max * s_frac
                        * realization.norm_hsr_sq / system.amp_efficiency)
    return per_eh - per_d2d + amp_energy_slope


def build_p1b(system: SystemParams, realization: ChannelRealization,
              alloc: ElementAllocation, p_b: float) -> SlotProgram:
    """Slot step of the element scenario at fixed counts and power."""
    a = system.amp_factor
    g1 = realization.h_bs + realization.h1 * alloc.gain_eh(a)
    g2_sq = (realization.h_sd + realization.h2 * alloc.gain_d2d(a)) ** 2
    p_lin = system.zeta * p_b * g1 * g1 / system.sigma1_sq
    s = harvesting.sigmoid_fraction(p_lin, system.y1, system.y2)
    sigma_e = _sigma_e_element(alloc.m_d2d, alloc.k_d2d, realization, system)

    lo_h, lo_r = _slot_bounds_common(system, s, g2_sq, sigma_e)
    t_lo = max(system.t_slot_min, lo_h, lo_r)
    t_hi = system.t_frame - system.t_slot_min
    slope = _slot_cost_slope(system, alloc.m_eh, alloc.k_eh, alloc.m_d2d,
                             alloc.k_d2d, p_b, s, realization)
    return SlotProgram(t_lo=t_lo, t_hi=t_hi, cost_slope=slope,
                       t_frame=system.t_frame)


_LSE_TOL_FRAC = 1e-6


def _causality_min_t_d2d(system: SystemParams, f14_unit: float, f15: float) -> float:
    """Smallest t_d2d with t_d2d*log2(e + f14/t_d2d) >= (T - t_d2d)*f15.

    f14_unit is the D2D SNR numerator (energy * gain^2 / noise); the left
    side uses the softened log (e in place of 1), making it concave and
    increasing, so a single bisection finds the crossing.
    """
    t_frame = system.t_frame
    t_min = system.t_slot_min
    t_max = t_frame - system.t_slot_min

    def g(t_d2d: float) -> float:
        lhs = t_d2d * math.log2(math.e + f14_unit / t_d2d)
        return lhs - (t_frame - t_d2d) * f15

    if g(t_min) >= 0.0:
        return t_min
    if g(t_max) < 0.0:
        raise Infeasible("causality cannot be met by any slot split")
    lo, hi = t_min, t_max
    tol = _LSE_TOL_FRAC * t_frame
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi


def build_p2b(system: SystemParams, realization: ChannelRealization,
              alloc: ModuleAllocation, p_b: float,
              t_eh_anchor: float) -> SlotProgram:
    """Slot step of the module scenario.

    Causality enters through a softened-log relaxation whose harvested
    energy is frozen at the anchor slot split.
    """
    a = system.amp_factor
    l1 = alloc.l_eh(a)
    l2 = alloc.l_d2d(a)
    g1 = realization.h_bs + realization.h3 * l1
    g2 = realization.h_sd + realization.h4 * l2
    p_lin = system.zeta * p_b * g1 * g1 / system.sigma1_sq
    s = harvesting.sigmoid_fraction(p_lin, system.y1, system.y2)
    sigma_m1 = link_rates.sigma_m1_sq(l1, realization, system)
    sigma_m2 = link_rates.sigma_m2_sq(l2, realization, system)

    lo_h, lo_r = _slot_bounds_common(system, s, g2 * g2, sigma_m2)

    e_anchor = system.harvest_max * s * t_eh_anchor
    f14 = e_anchor * g2 * g2 / sigma_m2
    f15 = (system.bw2 / system.bw3) * math.log2(1.0 + p_b * g1 * g1 / sigma_m1)
    t_d2d_min = _causality_min_t_d2d(system, f14, f15)

    m_eh, k_eh = alloc.elements_eh()
    m_d2d, k_d2d = alloc.elements_d2d()
    slope = _slot_cost_slope(system, m_eh, k_eh, m_d2d, k_d2d, p_b, s, realization)
    return SlotProgram(t_lo=max(system.t_slot_min, lo_h, lo_r),
                       t_hi=system.t_frame - max(system.t_slot_min, t_d2d_min),
                       cost_slope=slope, t_frame=system.t_frame)


@dataclass(frozen=True)
class PowerProgram:
    """Feasible transmit-power interval; energy rises with power, take the floor."""

    p_lo: float
    p_hi: float
    lb_harvest: float
    lb_rate: float

    def solve(self) -> float:
        if self.p_lo > self.p_hi * (1 + 1e-12):
            raise Infeasible("empty power interval: "
                             f"lo={self.p_lo:.6g} > hi={self.p_hi:.6g}")
        return min(self.p_lo, self.p_hi)


def _power_requirements(system: SystemParams, schedule: Schedule, g1_sq: float,
                        g2_sq: float, sigma_eff: float) -> tuple[float, float]:
    """Transmit power floors for the harvest target and the D2D rate floor."""
    req_h = harvesting.required_receive_power(
        system.e_min, schedule.t_eh, system.harvest_max, system.y1, system.y2)
    lb_h = system.sigma1_sq * max(req_h, 0.0) / (system.zeta * g1_sq)

    theta = link_rates.snr_floor(system.rate_thresh_d2d)
    e_req = theta * sigma_eff * schedule.t_d2d / g2_sq
    try:
        req_r = harvesting.required_receive_power(
            e_req, schedule.t_eh, system.harvest_max, system.y1, system.y2)
    except DomainError as exc:
        raise Infeasible("rate floor needs more energy than the harvest slot "
                         "can ever supply") from exc
    lb_r = system.sigma1_sq * max(req_r, 0.0) / (system.zeta * g1_sq)
    return lb_h, lb_r


def build_p1c(system: SystemParams, realization: ChannelRealization,
              alloc: ElementAllocation, schedule: Schedule) -> PowerProgram:
    """Power step of the element scenario: closed-form interval."""
    a = system.amp_factor
    g1_sq = (realization.h_bs + realization.h1 * alloc.gain_eh(a)) ** 2
    g2_sq = (realization.h_sd + realization.h2 * alloc.gain_d2d(a)) ** 2
    sigma_e = _sigma_e_element(alloc.m_d2d, alloc.k_d2d, realization, system)
    lb_h, lb_r = _power_requirements(system, schedule, g1_sq, g2_sq, sigma_e)
    return PowerProgram(p_lo=max(system.p_b_min, lb_h, lb_r),
                        p_hi=system.p_b_max, lb_harvest=lb_h, lb_rate=lb_r)


def build_p2c(system: SystemParams, realization: ChannelRealization,
              alloc: ModuleAllocation, schedule: Schedule,
              p_b_anchor: float) -> PowerProgram:
    """Power step of the module scenario.

    Causality caps the power from above; the cap freezes the harvested
    energy at the anchor power, consistent at the fixed point.
    """
    a = system.amp_factor
    l1 = alloc.l_eh(a)
    l2 = alloc.l_d2d(a)
    g1 = realization.h_bs + realization.h3 * l1
    g2 = realization.h_sd + realization.h4 * l2
    sigma_m1 = link_rates.sigma_m1_sq(l1, realization, system)
    sigma_m2 = link_rates.sigma_m2_sq(l2, realization, system)
    lb_h, lb_r = _power_requirements(system, schedule, g1 * g1, g2 * g2, sigma_m2)

    p_lin_anchor = system.zeta * p_b_anchor * g1 * g1 / system.sigma1_sq
    s_anchor = harvesting.sigmoid_fraction(p_lin_anchor, system.y1, system.y2)
    e_anchor = system.harvest_max * s_anchor * schedule.t_eh
    f11 = schedule.t_d2d * system.bw3 / (schedule.t_eh * system.bw2)
    f17 = g1 * g1 / sigma_m1
    f18 = f11 * math.log2(1.0 + e_anchor * g2 * g2 / (schedule.t_d2d * sigma_m2))
    cap = (2.0 ** f18 - 1.0) / f17 if f17 > 0 else math.inf
    return PowerProgram(p_lo=max(system.p_b_min, lb_h, lb_r),
                        p_hi=min(system.p_b_max, cap),
                        lb_harvest=lb_h, lb_rate=lb_r)


# ---------------------------------------------------------------------------
# Rounding of the relaxed count step
# ---------------------------------------------------------------------------

def _ceil(v: float) -> int:
    return int(math.ceil(v - _CEIL_EPS))


def _round_counts(relaxed: Sequence[float]) -> list[int]:
    return [max(0, _ceil(v)) for v in relaxed]


def _trim_to_capacity(slots: list[int], relaxed: Sequence[float],
                      usage: Callable[[list[int]], int], cap: int) -> list[int]:
    """Drop ceil inflation until the derived totals fit the surface.

    Removes first from the count that gained most by rounding up; among ties
    active counts shrink before passive ones (indices 0, 2 are active).
    """
    slots = list(slots)
    while usage(slots) > cap:
        candidates = [i for i in range(4) if slots[i] > 0]
        if not candidates:
            raise RoundingFailed("capacity exceeded with all counts at zero")
        def key(i: int) -> tuple[float, int]:
            inflation = slots[i] - relaxed[i]
            active_first = 0 if i in (0, 2) else 1
            return (-inflation, active_first, i)
        slots[sorted(candidates, key=key)[0]] -= 1
    return slots


def _violation(rep, system: SystemParams) -> float:
    """Aggregate normalized constraint violation of a feasibility report."""
    v = max(0.0, -rep.harvest_slack) / system.e_min
    v += max(0.0, -rep.rate_slack) / max(1.0, system.rate_thresh_d2d)
    v += max(0.0, -rep.causality_slack)
    return v


# moves tried per escalation step: +1 on a slot count (passives first),
# then passive-to-active swaps that buy amplitude at zero capacity cost
_ESCALATE_MOVES: tuple[tuple[int, ...], ...] = (
    (0, 1, 0, 0), (0, 0, 0, 1), (1, 0, 0, 0), (0, 0, 1, 0),
    (1, -1, 0, 0), (0, 0, 1, -1),
)


def _escalate(slots: list[int], system: SystemParams,
              fits: Callable[[list[int]], bool],
              check: Callable[[list[int]], "object"],
              cost: Callable[[list[int]], float]) -> list[int]:
    """Adjust switch counts one move at a time until the exact constraints hold.

    Each step tries every move with capacity room: a feasible candidate of
    least exact cost wins, otherwise the least-violating one; passive counts
    win ties through the trial order.
    """
    report = check(slots)
    guard = 0
    while not report.ok:
        guard += 1
        if guard > 10000:
            raise RoundingFailed("rounding escalation did not terminate")
        best = None
        for move in _ESCALATE_MOVES:
            cand = [s + d for s, d in zip(slots, move)]
            if min(cand) < 0 or not fits(cand):
                continue
            rep = check(cand)
            key = (0, cost(cand)) if rep.ok else (1, _violation(rep, system))
            if best is None or key < best[0]:
                best = (key, cand, rep)
        if best is None:
            raise RoundingFailed("no capacity left while constraints are unmet")
        _, slots, report = best
    return slots


# reverse moves tried by the post-escalation polish: -1 on a slot count
# (actives first), then active-to-passive swaps
_POLISH_MOVES: tuple[tuple[int, ...], ...] = (
    (-1, 0, 0, 0), (0, 0, -1, 0), (0, -1, 0, 0), (0, 0, 0, -1),
    (-1, 1, 0, 0), (0, 0, -1, 1),
)


def _polish(slots: list[int],
            fits: Callable[[list[int]], bool],
            check: Callable[[list[int]], "object"],
            cost: Callable[[list[int]], float]) -> list[int]:
    """Greedily remove or downgrade switches while the exact constraints hold.

    Ceil rounding and escalation both stop at the first feasible point and can
    leave one removable switch behind; this walks back down the cost surface.
    """
    best_cost = cost(slots)
    improved = True
    while improved:
        improved = False
        for move in _POLISH_MOVES:
            cand = [s + d for s, d in zip(slots, move)]
            if min(cand) < 0 or not fits(cand):
                continue
            if not check(cand).ok:
                continue
            c = cost(cand)
            if c < best_cost - 1e-18:
                slots, best_cost, improved = cand, c, True
                break
    return slots


def round_element(relaxed: np.ndarray, system: SystemParams,
                  realization: ChannelRealization, schedule: Schedule,
                  p_b: float) -> ElementAllocation:
    """Round the relaxed element counts and certify them on the exact model.

    relaxed follows the build_p1a variable order; only the per-slot counts
    matter, the owned totals are derived as the per-slot maxima.
    """
    slots = _round_counts(relaxed[2:6])  # [m_eh, k_eh, m_d2d, k_d2d]
    n = system.n_total

    def usage(s: list[int]) -> int:
        return max(s[0], s[2]) + max(s[1], s[3])

    slots = _trim_to_capacity(slots, relaxed[2:6], usage, n)

    def make(s: list[int]) -> ElementAllocation:
        return ElementAllocation(m=max(s[0], s[2]), k=max(s[1], s[3]),
                                 m_eh=s[0], k_eh=s[1], m_d2d=s[2], k_d2d=s[3])

    def check(s: list[int]):
        return feasibility(make(s), schedule, p_b, realization, system)

    def cost(s: list[int]) -> float:
        return objective_exact(make(s), schedule, p_b, realization, system)

    def fits(s: list[int]) -> bool:
        return usage(s) <= n

    slots = _escalate(slots, system, fits, check, cost)
    slots = _polish(slots, fits, check, cost)
    return make(slots)


def round_module(relaxed: np.ndarray, system: SystemParams,
                 realization: ChannelRealization, schedule: Schedule,
                 p_b: float, m_star: int, k_star: int) -> ModuleAllocation:
    """Round the relaxed module counts and certify them on the exact model."""
    slots = _round_counts(relaxed[2:6])  # [ma_eh, kp_eh, ma_d2d, kp_d2d]
    n = system.n_total

    def usage(s: list[int]) -> int:
        return max(s[0], s[2]) * m_star + max(s[1], s[3]) * k_star

    slots = _trim_to_capacity(slots, relaxed[2:6], usage, n)

    def make(s: list[int]) -> ModuleAllocation:
        return ModuleAllocation(m_star=m_star, k_star=k_star,
                                ma=max(s[0], s[2]), kp=max(s[1], s[3]),
                                ma_eh=s[0], kp_eh=s[1], ma_d2d=s[2], kp_d2d=s[3])

    def check(s: list[int]):
        return feasibility(make(s), schedule, p_b, realization, system)

    def cost(s: list[int]) -> float:
        return objective_exact(make(s), schedule, p_b, realization, system)

    def fits(s: list[int]) -> bool:
        return usage(s) <= n

    slots = _escalate(slots, system, fits, check, cost)
    slots = _polish(slots, fits, check, cost)
    return make(slots)
