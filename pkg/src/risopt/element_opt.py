"""Alternating solver for the per-element switching scenario."""
from __future__ import annotations

import math

import numpy as np

from . import sca
from .allocation import Schedule, SolveReport
from .channel import ChannelRealization
from .errors import DomainError, Infeasible
from .evaluate import feasibility, objective_exact
from .params import SystemParams

DEFAULT_EPSILON = 1e-3
DEFAULT_MAX_ITERS = 50


def initial_anchor(system: SystemParams) -> sca.FeasiblePoint:
    """Warm start: a quarter of the panel active and passive in both slots."""
    c = float(math.ceil(system.n_total / 4))
    return sca.FeasiblePoint(active_eh=c, passive_eh=c, active_d2d=c,
                             passive_d2d=c, t_eh=0.6 * system.t_frame,
                             p_b=max(0.5 * system.p_b_max, system.p_b_min))


def _doubled_counts(anchor: sca.FeasiblePoint, n_total: int) -> sca.FeasiblePoint:
    """Recovery anchor: double every count, rescaled to fit the surface."""
    counts = [2.0 * v for v in anchor.counts()]
    load = max(counts[0], counts[2]) + max(counts[1], counts[3])
    if load > n_total:
        scale = n_total / load
        counts = [v * scale for v in counts]
    return sca.FeasiblePoint(active_eh=counts[0], passive_eh=counts[1],
                             active_d2d=counts[2], passive_d2d=counts[3],
                             t_eh=anchor.t_eh, p_b=anchor.p_b)


def _vec_converged(vec: np.ndarray, prev: np.ndarray, epsilon: float) -> bool:
    return bool(np.all(np.abs(vec - prev) <= epsilon * np.maximum(1.0, np.abs(prev))))


def run_algorithm1(system: SystemParams, realization: ChannelRealization,
                   epsilon: float = DEFAULT_EPSILON,
                   max_iters: int = DEFAULT_MAX_ITERS) -> SolveReport:
    """Minimize panel energy over counts, slot split and transmit power.

    Each iteration solves the three subproblems in sequence and re-anchors
    at the rounded, exactly-feasible iterate.  Convergence requires every
    decision variable and the objective to move less than epsilon in
    relative terms between consecutive accepted iterates.
    """
    anchor = initial_anchor(system)
    retried = False
    trace: list[float] = []
    prev_vec: np.ndarray | None = None
    best: tuple[float, object, Schedule, float, object] | None = None
    last: tuple[object, Schedule, float, object] | None = None
    converged = False
    it = 0

    while it < max_iters:
        it += 1
        try:
            lp = sca.build_p1a(system, realization, anchor)
            relaxed = lp.solve()
            sched_anchor = Schedule(t_eh=anchor.t_eh,
                                    t_d2d=system.t_frame - anchor.t_eh)
            alloc = sca.round_element(relaxed, system, realization,
                                      sched_anchor, anchor.p_b)
            schedule = sca.build_p1b(system, realization, alloc, anchor.p_b).solve()
            p_b = sca.build_p1c(system, realization, alloc, schedule).solve()
        except (Infeasible, DomainError) as exc:
            if retried:
                raise Infeasible(f"count step failed twice: {exc}") from exc
            retried = True
            anchor = _doubled_counts(anchor, system.n_total)
            continue

        anchor = sca.FeasiblePoint(active_eh=alloc.m_eh, passive_eh=alloc.k_eh,
                                   active_d2d=alloc.m_d2d, passive_d2d=alloc.k_d2d,
                                   t_eh=schedule.t_eh, p_b=p_b)
        rep = feasibility(alloc, schedule, p_b, realization, system)
        if not rep.ok:
            continue

        obj = objective_exact(alloc, schedule, p_b, realization, system)
        trace.append(obj)
        last = (alloc, schedule, p_b, rep)
        if best is None or obj < best[0]:
            best = (obj, alloc, schedule, p_b, rep)

        vec = np.array([alloc.m, alloc.k, alloc.m_eh, alloc.k_eh,
                        alloc.m_d2d, alloc.k_d2d, schedule.t_eh, p_b])
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
