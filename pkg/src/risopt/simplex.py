"""Dense two-phase simplex for the tiny subproblem LPs.

Problems here have at most eight variables and a dozen rows, so a plain
tableau method with Bland's rule (lowest-index entering and leaving variable)
is exact enough and fully deterministic: ties at degenerate vertices always
resolve in lexicographic variable order.
"""
from __future__ import annotations

import numpy as np

from .errors import Infeasible, Unbounded

_TOL = 1e-9


def _pivot(tab: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    for r in range(tab.shape[0]):
        if r != row and abs(tab[r, col]) > 0.0:
            tab[r] -= tab[r, col] * tab[row]
    basis[row] = col


def _bland_step(tab: np.ndarray, basis: np.ndarray, cost: np.ndarray,
                allowed: int) -> bool:
    """One simplex step on reduced costs; returns False at optimality."""
    reduced = cost.copy()
    for r, b in enumerate(basis):
        if abs(cost[b]) > 0.0:
            reduced -= cost[b] * tab[r, :-1]
    entering = -1
    for j in range(allowed):
        if reduced[j] < -_TOL:
            entering = j
            break
    if entering < 0:
        return False
    ratios = []
    for r in range(tab.shape[0]):
        a = tab[r, entering]
        if a > _TOL:
            ratios.append((tab[r, -1] / a, basis[r], r))
    if not ratios:
        raise Unbounded("objective decreases without bound")
    ratios.sort(key=lambda t: (t[0], t[1]))
    _pivot(tab, basis, ratios[0][2], entering)
    return True


def solve_lp(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None, bounds=None):
    """Minimize c @ x subject to a_ub @ x <= b_ub, a_eq @ x = b_eq, lo <= x <= hi.

    Args:
        c: cost vector, length n.
        a_ub, b_ub: inequality rows (may be None).
        a_eq, b_eq: equality rows (may be None).
        bounds: per-variable (lo, hi) pairs; defaults to (0, None). Lower
            bounds must be finite; hi may be None for unbounded above.

    Returns:
        Optimal x as a float ndarray. Degenerate ties resolve deterministically
        by lowest variable index (Bland's rule throughout).

    Raises:
        Infeasible: empty feasible set.
        Unbounded: cost unbounded below on the feasible set.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    if bounds is None:
        bounds = [(0.0, None)] * n
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = [b[1] for b in bounds]
    if not np.all(np.isfinite(lo)):
        raise ValueError("lower bounds must be finite")

    rows_ub = []
    rhs_ub = []
    if a_ub is not None:
        a_ub = np.atleast_2d(np.asarray(a_ub, dtype=float))
        b_ub = np.atleast_1d(np.asarray(b_ub, dtype=float))
        for i in range(a_ub.shape[0]):
            rows_ub.append(a_ub[i])
            rhs_ub.append(b_ub[i] - a_ub[i] @ lo)
    for j, h in enumerate(hi):
        if h is not None:
            row = np.zeros(n)
            row[j] = 1.0
            rows_ub.append(row)
            rhs_ub.append(h - lo[j])
            if h - lo[j] < -_TOL:
                raise Infeasible(f"bounds for variable {j} are empty")

    rows_eq = []
    rhs_eq = []
    if a_eq is not None:
        a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
        b_eq = np.atleast_1d(np.asarray(b_eq, dtype=float))
        for i in range(a_eq.shape[0]):
            rows_eq.append(a_eq[i])
            rhs_eq.append(b_eq[i] - a_eq[i] @ lo)

    m_ub, m_eq = len(rows_ub), len(rows_eq)
    m = m_ub + m_eq
    if m == 0:
        # pure bound problem: each coordinate independently
        x = lo.copy()
        for j in range(n):
            if c[j] < 0.0:
                if hi[j] is None:
                    raise Unbounded(f"variable {j} unbounded below in cost")
                x[j] = hi[j]
        return x

    # columns: n structural | m_ub slacks | m artificials | rhs
    n_slack = m_ub
    n_art = m
    width = n + n_slack + n_art + 1
    tab = np.zeros((m, width))
    basis = np.zeros(m, dtype=int)
    for i in range(m_ub):
        row, rhs = rows_ub[i], rhs_ub[i]
        sign = 1.0 if rhs >= 0.0 else -1.0
        tab[i, :n] = sign * row
        tab[i, n + i] = sign
        tab[i, -1] = sign * rhs
    for e in range(m_eq):
        i = m_ub + e
        row, rhs = rows_eq[e], rhs_eq[e]
        sign = 1.0 if rhs >= 0.0 else -1.0
        tab[i, :n] = sign * row
        tab[i, -1] = sign * rhs
    for i in range(m):
        tab[i, n + n_slack + i] = 1.0
        basis[i] = n + n_slack + i

    # phase 1: drive artificials to zero
    cost1 = np.zeros(width - 1)
    cost1[n + n_slack:] = 1.0
    while _bland_step(tab, basis, cost1, width - 1):
        pass
    phase1_value = sum(tab[r, -1] for r in range(m) if basis[r] >= n + n_slack)
    if phase1_value > 1e-7:
        raise Infeasible("phase-1 optimum positive: no feasible point")
    # pivot residual artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= n + n_slack:
            for j in range(n + n_slack):
                if abs(tab[r, j]) > _TOL:
                    _pivot(tab, basis, r, j)
                    break

    # phase 2 on structural + slack columns only
    cost2 = np.zeros(width - 1)
    cost2[:n] = c
    while _bland_step(tab, basis, cost2, n + n_slack):
        pass

    x = lo.copy()
    for r, b in enumerate(basis):
        if b < n:
            x[b] += tab[r, -1]
    return x
