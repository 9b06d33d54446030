"""Alternating solver for the module-switching scenario, plus the two-stage
pipeline that sizes modules with the element solver first."""
from __future__ import annotations

import numpy as np

from . import sca
from .allocation import Schedule, SolveReport
from .channel import ChannelRealization
from .element_opt import (DEFAULT_EPSILON, DEFAULT_MAX_ITERS, _doubled_counts,
                          _vec_converged, initial_anchor, run_algorithm1)
from .errors import DomainError, Infeasible
from .evaluate import feasibility, objective_exact
from .params import SystemParams


def _initial_module_anchor(system: SystemParams, m_star: int,
                           k_star: int) -> sca.FeasiblePoint:
    base = initial_anchor(system)
    return sca.FeasiblePoint(active_eh=base.active_eh / m_star,
                             passive_eh=base.passive_eh / k_star,
                             active_d2d=base.active_d2d / m_star,
                             passive_d2d=base.passive_d2d / k_star,
                             t_eh=base.t_eh, p_b=base.p_b)


def run_algorithm2(system: SystemParams, realization: ChannelRealization,
                   m_star: int, k_star: int,
                   epsilon: float = DEFAULT_EPSILON,
                   max_iters: int = DEFAULT_MAX_ITERS) -> SolveReport:
    """Minimize panel energy over connected modules, slot split and power.

    Same alternation as the element solver with module-count subproblems and
    the information-causality constraint throughout.
    """
    anchor = _initial_module_anchor(system, m_star, k_star)
    retried = False
    trace: list[float] = []
    prev_vec: np.ndarray | None = None
    best = None
    last = None
    converged = False
    it = 0

    while it < max_iters:
        it += 1
        try:
            lp = sca.build_p2a(system, realization, anchor, m_star, k_star)
            relaxed = lp.solve()
            sched_anchor = Schedule(t_eh=anchor.t_eh,
                                    t_d2d=system.t_frame - anchor.t_eh)
            alloc = sca.round_module(relaxed, system, realization, sched_anchor,
                                     anchor.p_b, m_star, k_star)
            schedule = sca.build_p2b(system, realization, alloc, anchor.p_b,
                                     anchor.t_eh).solve()
            p_b = sca.build_p2c(system, realization, alloc, schedule,
                                anchor.p_b).solve()
        except (Infeasible, DomainError) as exc:
            if retried:
                raise Infeasible(f"module count step failed twice: {exc}") from exc
            retried = True
            # conservative recovery anchor: more modules, floor power (a high
            # anchor power can leave the linearized causality row no headroom)
            doubled = _doubled_counts(
                anchor, system.n_total // max(1, min(m_star, k_star)))
            anchor = sca.FeasiblePoint(
                active_eh=doubled.active_eh, passive_eh=doubled.passive_eh,
                active_d2d=doubled.active_d2d, passive_d2d=doubled.passive_d2d,
                t_eh=doubled.t_eh, p_b=system.p_b_min)
            continue

        anchor = sca.FeasiblePoint(active_eh=alloc.ma_eh, passive_eh=alloc.kp_eh,
                                   active_d2d=alloc.ma_d2d, passive_d2d=alloc.kp_d2d,
                                   t_eh=schedule.t_eh, p_b=p_b)
        rep = feasibility(alloc, schedule, p_b, realization, system)
        if not rep.ok:
            continue

        obj = objective_exact(alloc, schedule, p_b, realization, system)
        trace.append(obj)
        last = (alloc, schedule, p_b, rep)
        if best is None or obj < best[0]:
            best = (obj, alloc, schedule, p_b, rep)

        vec = np.array([alloc.ma, alloc.kp, alloc.ma_eh, alloc.kp_eh,
                        alloc.ma_d2d, alloc.kp_d2d, schedule.t_eh, p_b])
        if prev_vec is not None and _vec_converged(vec, prev_vec, epsilon):
            if len(trace) < 2 or (abs(trace[-1] - trace[-2])
                                  <= epsilon * max(1.0, abs(trace[-1]))):
                converged = True
                break
        prev_vec = vec

    if last is None:
        raise Infeasible("no iterate ever satisfied the exact constraints")
    if converged:
        alloc, schedule, p_b, rep = last
    else:
        _, alloc, schedule, p_b, rep = best

    return SolveReport(allocation=alloc, schedule=schedule, p_b=p_b,
                       harvested_energy=rep.harvested,
                       ris_energy=objective_exact(alloc, schedule, p_b,
                                                  realization, system),
                       rate_bs=rep.rate_bs, rate_d2d=rep.rate_d2d,
                       iterations=it, converged=converged, trace=tuple(trace))


def run_pipeline(system: SystemParams, realization: ChannelRealization,
                 epsilon: float = DEFAULT_EPSILON,
                 max_iters: int = DEFAULT_MAX_ITERS,
                 m_star: int | None = None,
                 k_star: int | None = None) -> tuple[SolveReport, SolveReport]:
    """Element solve first; its optimal counts size the modules.

    Passing m_star/k_star skips the derivation and forces the module sizes.
    """
    element_report = run_algorithm1(system, realization, epsilon, max_iters)
    if m_star is None:
        m_star = max(1, element_report.allocation.m)
    if k_star is None:
        k_star = max(1, element_report.allocation.k)
    module_report = run_algorithm2(system, realization, m_star, k_star,
                                   epsilon, max_iters)
    return element_report, module_report
