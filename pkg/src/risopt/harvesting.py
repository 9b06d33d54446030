"""Non-linear energy harvesting model.

The harvester banks energy following a logistic curve of the received-signal
strength measure p_linear = zeta * p_b * (h_bs + G)^2 / sigma1_sq:

    energy(t_eh) = harvest_max * t_eh / (1 + exp(-y1 * (p_linear - y2)))

y2 is the midpoint (half the saturation rate), y1 the steepness. The curve is
used as-is, including its non-zero output at p_linear = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .params import SystemParams

_EXP_CLAMP = 700.0  # keep exp() inside double range
SATURATION_FRACTION = 0.99


@dataclass(frozen=True)
class HarvestResult:
    """Harvest-slot outcome: input measure, banked energy, saturation flag."""

    p_linear: float
    energy: float
    saturated: bool


def linear_receive_power(p_b: float, h_bs: float, cascade_gain: float,
                         zeta: float, sigma1_sq: float) -> float:
    """Harvester input measure zeta * p_b * (h_bs + cascade_gain)^2 / sigma1_sq.

    cascade_gain is the panel contribution already folded down to an amplitude,
    e.g. (a_m*m(i') + k(i')) * h1 or L(i') * h3.
    """
    if sigma1_sq <= 0.0:
        raise DomainError("sigma1_sq must be positive")
    if p_b < 0.0:
        raise DomainError("p_b must be non-negative")
    return zeta * p_b * (h_bs + cascade_gain) ** 2 / sigma1_sq


def sigmoid_fraction(p_linear: float, y1: float, y2: float) -> float:
    """Harvested fraction of the saturation rate, in (0, 1)."""
    arg = -y1 * (p_linear - y2)
    arg = max(-_EXP_CLAMP, min(_EXP_CLAMP, arg))
    return 1.0 / (1.0 + math.exp(arg))


def sigmoid_slope(p_linear: float, y1: float, y2: float) -> float:
    """d/dp of sigmoid_fraction; used by first-order expansions."""
    s = sigmoid_fraction(p_linear, y1, y2)
    return y1 * s * (1.0 - s)


def harvested_energy(p_linear: float, t_eh: float, harvest_max: float,
                     y1: float, y2: float) -> float:
    """Energy banked over a harvest slot of t_eh seconds, joules."""
    if t_eh <= 0.0:
        raise DomainError(f"t_eh must be positive, got {t_eh}")
    return harvest_max * t_eh * sigmoid_fraction(p_linear, y1, y2)


def required_receive_power(e_required: float, t_eh: float, harvest_max: float,
                           y1: float, y2: float) -> float:
    """Invert the harvest curve: smallest p_linear banking e_required.

    Returns y2 - ln(harvest_max*t_eh/e_required - 1) / y1. The value is
    negative when the slot banks e_required even with no received signal.

    Raises:
        DomainError: when harvest_max * t_eh <= e_required (saturation can
            never bank that much) or e_required <= 0.
    """
    if e_required <= 0.0:
        raise DomainError(f"e_required must be positive, got {e_required}")
    if t_eh <= 0.0:
        raise DomainError(f"t_eh must be positive, got {t_eh}")
    headroom = harvest_max * t_eh / e_required - 1.0
    if headroom <= 0.0:
        raise DomainError(
            f"requirement {e_required} J is not below the saturation bound "
            f"{harvest_max * t_eh} J")
    return y2 - math.log(headroom) / y1


def evaluate(p_b: float, h_bs: float, cascade_gain: float, t_eh: float,
             system: SystemParams) -> HarvestResult:
    """Full harvest-slot evaluation with saturation flagging."""
    p_lin = linear_receive_power(p_b, h_bs, cascade_gain, system.zeta, system.sigma1_sq)
    energy = harvested_energy(p_lin, t_eh, system.harvest_max, system.y1, system.y2)
    saturated = energy >= SATURATION_FRACTION * system.harvest_max * t_eh
    return HarvestResult(p_linear=p_lin, energy=energy, saturated=saturated)
