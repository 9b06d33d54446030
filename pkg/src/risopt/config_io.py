"""Plain-text scenario configuration.

Files hold one `key = value` pair per line, `#` starts a comment, and values
may carry a unit suffix: dBm/mW/W for powers, ms/s for times, mJ/J for
energies.  Unknown keys and malformed lines are rejected.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError
from .params import ChannelParams, SystemParams, validate

_POWER = "power"
_TIME = "time"
_ENERGY = "energy"
_PLAIN = "plain"
_INT = "int"

_SYSTEM_KEYS = {
    "n_total": _INT,
    "amp_factor": _PLAIN,
    "amp_efficiency": _PLAIN,
    "p_sc": _POWER,
    "p_dc": _POWER,
    "zeta": _PLAIN,
    "harvest_max": _POWER,
    "y1": _PLAIN,
    "y2": _POWER,
    "e_min": _ENERGY,
    "rate_thresh_d2d": _PLAIN,
    "rate_thresh_bs": _PLAIN,
    "bw1": _PLAIN,
    "bw2": _PLAIN,
    "bw3": _PLAIN,
    "sigma1_sq": _POWER,
    "sigma2_sq": _POWER,
    "t_frame": _TIME,
    "p_b_max": _POWER,
    "p_b_min": _POWER,
    "t_slot_min": _TIME,
}
_CHANNEL_KEYS = {
    "d1": _PLAIN,
    "d2": _PLAIN,
    "delta1": _PLAIN,
    "delta2": _PLAIN,
    "rician_e": _PLAIN,
    "rician_s": _PLAIN,
    "wavelength": _PLAIN,
    "d_ris_s": _PLAIN,
    "delta_ris": _PLAIN,
}
_RUN_KEYS = {
    "seed": _INT,
    "epsilon": _PLAIN,
    "max_iters": _INT,
    "m_star": _INT,
    "k_star": _INT,
}

_UNIT_SCALE = {
    _POWER: {"mw": 1e-3, "w": 1.0},
    _TIME: {"ms": 1e-3, "s": 1.0},
    _ENERGY: {"mj": 1e-3, "j": 1.0},
}


@dataclass(frozen=True)
class Scenario:
    system: SystemParams
    channel: ChannelParams
    seed: int = 0
    epsilon: float = 1e-3
    max_iters: int = 50
    m_star: int | None = None
    k_star: int | None = None


def parse_value(key: str, raw: str, kind: str, where: str = "") -> float | int:
    tokens = raw.split()
    if not tokens or len(tokens) > 2:
        raise ParseError(f"{where}malformed value {raw!r} for {key}")
    try:
        number = float(tokens[0])
    except ValueError as exc:
        raise ParseError(f"{where}not a number: {tokens[0]!r} for {key}") from exc
    if len(tokens) == 2:
        unit = tokens[1].lower()
        if kind == _POWER and unit == "dbm":
            number = 10.0 ** (number / 10.0) * 1e-3
        elif kind in _UNIT_SCALE and unit in _UNIT_SCALE[kind]:
            number *= _UNIT_SCALE[kind][unit]
        else:
            raise ParseError(f"{where}unit {tokens[1]!r} not valid for {key}")
    if kind == _INT:
        if not math.isfinite(number) or number != int(number):
            raise ParseError(f"{where}{key} must be an integer, got {raw!r}")
        return int(number)
    return number


def parse_pairs(text: str, source: str = "<config>") -> dict[str, str]:
    """Raw key -> value-string pairs, comments stripped, duplicates rejected."""
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = body.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ParseError(f"{source}:{lineno}: expected 'key = value'")
        if key in pairs:
            raise ParseError(f"{source}:{lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def scenario_from_pairs(pairs: dict[str, str], source: str = "<config>") -> Scenario:
    sys_kw: dict = {}
    ch_kw: dict = {}
    run_kw: dict = {}
    for key, raw in pairs.items():
        where = f"{source}: "
        if key in _SYSTEM_KEYS:
            sys_kw[key] = parse_value(key, raw, _SYSTEM_KEYS[key], where)
        elif key in _CHANNEL_KEYS:
            ch_kw[key] = parse_value(key, raw, _CHANNEL_KEYS[key], where)
        elif key in _RUN_KEYS:
            run_kw[key] = parse_value(key, raw, _RUN_KEYS[key], where)
        else:
            raise ParseError(f"{source}: unknown key {key!r}")
    system = SystemParams(**sys_kw)
    channel = ChannelParams(**ch_kw)
    validate(system, channel)
    return Scenario(system=system, channel=channel, **run_kw)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    return scenario_from_pairs(parse_pairs(path.read_text(), str(path)), str(path))


def apply_axis(scenario: Scenario, axis: str, value: float) -> Scenario:
    """Copy of the scenario with one numeric key replaced."""
    if axis in _SYSTEM_KEYS:
        cast = int(value) if _SYSTEM_KEYS[axis] == _INT else float(value)
        system = dataclasses.replace(scenario.system, **{axis: cast})
        validate(system, scenario.channel)
        return dataclasses.replace(scenario, system=system)
    if axis in _CHANNEL_KEYS:
        channel = dataclasses.replace(scenario.channel, **{axis: float(value)})
        validate(scenario.system, channel)
        return dataclasses.replace(scenario, channel=channel)
    if axis in _RUN_KEYS:
        cast = int(value) if _RUN_KEYS[axis] == _INT else float(value)
        return dataclasses.replace(scenario, **{axis: cast})
    raise ParseError(f"unknown sweep axis {axis!r}")


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple[float, ...]
    repetitions: int
    scenario: Scenario
    label: str


def load_sweep_spec(path: str | Path) -> SweepSpec:
    """Sweep description: axis, values, repetitions, base (config path), label."""
    path = Path(path)
    pairs = parse_pairs(path.read_text(), str(path))
    missing = {"axis", "values", "base"} - set(pairs)
    if missing:
        raise ParseError(f"{path}: sweep spec missing {sorted(missing)}")
    axis = pairs.pop("axis")
    all_keys = {**_SYSTEM_KEYS, **_CHANNEL_KEYS, **_RUN_KEYS}
    if axis not in all_keys:
        raise ParseError(f"{path}: unknown sweep axis {axis!r}")
    kind = all_keys[axis]
    values = tuple(
        float(parse_value(axis, item.strip(), kind, f"{path}: "))
        for item in pairs.pop("values").split(","))
    if not values:
        raise ParseError(f"{path}: empty values list")
    reps_raw = pairs.pop("repetitions", "20")
    repetitions = int(parse_value("repetitions", reps_raw, _INT, f"{path}: "))
    if repetitions < 1:
        raise ParseError(f"{path}: repetitions must be positive")
    base = path.parent / pairs.pop("base")
    label = pairs.pop("label", axis)
    if pairs:
        raise ParseError(f"{path}: unknown sweep keys {sorted(pairs)}")
    return SweepSpec(axis=axis, values=values, repetitions=repetitions,
                     scenario=load_scenario(base), label=label)
