"""Decision-variable containers: allocations, schedules, solve reports."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidParam


def _check_slot(total: int, slot: int, name: str) -> None:
    if slot < 0 or total < 0:
        raise InvalidParam(f"{name} counts must be non-negative")
    if slot > total:
        raise InvalidParam(f"{name} slot count {slot} exceeds owned total {total}")


@dataclass(frozen=True)
class ElementAllocation:
    """Element-scenario decision: owned counts plus per-slot usage.

    m/k are the active/passive elements installed on the panel; *_eh and
    *_d2d are how many of them switch on during the harvest and D2D slots.
    """

    m: int
    k: int
    m_eh: int
    k_eh: int
    m_d2d: int
    k_d2d: int

    def __post_init__(self) -> None:
        _check_slot(self.m, self.m_eh, "active EH")
        _check_slot(self.m, self.m_d2d, "active D2D")
        _check_slot(self.k, self.k_eh, "passive EH")
        _check_slot(self.k, self.k_d2d, "passive D2D")

    def check_cap(self, n_total: int) -> None:
        if self.m + self.k > n_total:
            raise InvalidParam(f"m + k = {self.m + self.k} exceeds panel size {n_total}")

    def gain_eh(self, amp_factor: float) -> float:
        """Cascade count weight during harvesting: a_m*m(i') + k(i')."""
        return amp_factor * self.m_eh + self.k_eh

    def gain_d2d(self, amp_factor: float) -> float:
        return amp_factor * self.m_d2d + self.k_d2d


@dataclass(frozen=True)
class ModuleAllocation:
    """Module-scenario decision: module sizes, owned module counts, per-slot usage.

    m_star/k_star elements per active/passive module, one microcontroller per
    module. ma/kp modules installed; *_eh and *_d2d switched on per slot.
    """

    m_star: int
    k_star: int
    ma: int
    kp: int
    ma_eh: int
    kp_eh: int
    ma_d2d: int
    kp_d2d: int

    def __post_init__(self) -> None:
        if self.m_star < 1 or self.k_star < 1:
            raise InvalidParam("module sizes must be >= 1")
        _check_slot(self.ma, self.ma_eh, "active-module EH")
        _check_slot(self.ma, self.ma_d2d, "active-module D2D")
        _check_slot(self.kp, self.kp_eh, "passive-module EH")
        _check_slot(self.kp, self.kp_d2d, "passive-module D2D")

    def check_cap(self, n_total: int) -> None:
        used = self.ma * self.m_star + self.kp * self.k_star
        if used > n_total:
            raise InvalidParam(f"module elements {used} exceed panel size {n_total}")

    @property
    def microcontrollers(self) -> int:
        return self.ma + self.kp

    def l_eh(self, amp_factor: float) -> float:
        """Harvest-slot module gain weight L(i') = a_m*m*'*Ma(i') + k*'*Kp(i')."""
        return amp_factor * self.m_star * self.ma_eh + self.k_star * self.kp_eh

    def l_d2d(self, amp_factor: float) -> float:
        return amp_factor * self.m_star * self.ma_d2d + self.k_star * self.kp_d2d

    def elements_eh(self) -> tuple[int, int]:
        """(active, passive) element counts switched on in the harvest slot."""
        return self.m_star * self.ma_eh, self.k_star * self.kp_eh

    def elements_d2d(self) -> tuple[int, int]:
        return self.m_star * self.ma_d2d, self.k_star * self.kp_d2d


@dataclass(frozen=True)
class Schedule:
    """Frame split: harvest-then-transmit slot durations in seconds."""

    t_eh: float
    t_d2d: float

    def __post_init__(self) -> None:
        if not (self.t_eh > 0.0 and self.t_d2d > 0.0):
            raise InvalidParam(f"slot durations must be positive, got {self.t_eh}, {self.t_d2d}")

    @property
    def total(self) -> float:
        return self.t_eh + self.t_d2d

    def check_frame(self, t_frame: float, rel: float = 1e-9) -> None:
        if abs(self.total - t_frame) > rel * max(1.0, t_frame):
            raise InvalidParam(f"slots sum to {self.total}, frame is {t_frame}")


@dataclass(frozen=True)
class SolveReport:
    """Converged (or best-feasible) solution of one scenario.

    trace holds the exact objective value of the accepted iterate after each
    outer iteration. converged=False means the iteration cap was reached; the
    best exact-feasible iterate found is still reported.
    """

    allocation: ElementAllocation | ModuleAllocation
    schedule: Schedule
    p_b: float
    harvested_energy: float
    ris_energy: float
    rate_bs: float
    rate_d2d: float
    iterations: int
    converged: bool
    trace: tuple[float, ...] = field(default_factory=tuple)
