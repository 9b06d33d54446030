"""Seeded parameter sweeps and figure-ready aggregations.

Every sweep point produces two CSV rows: the optimized surface and the
dark-surface baseline under the same channel draw.  Repetition r of every
axis value reuses seed base+r, so trend comparisons across the axis are
paired per seed.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .allocation import ModuleAllocation
from .baseline import solve_baseline
from .channel import realize_channel
from .config_io import Scenario, SweepSpec, apply_axis
from .errors import MissingColumn, ParseError
from .module_opt import run_pipeline

_SIG = "%.12g"


@dataclass(frozen=True)
class ResultRow:
    scenario_id: str
    seed: int
    n_total: int
    zeta: float
    amp_factor: float
    t_frame_ms: float
    t_eh_ms: float
    t_d2d_ms: float
    m_star: int
    k_star: int
    ma: int
    kp: int
    microcontrollers: int
    p_b_dbm: float
    harvested_mj: float
    ris_energy_mj: float
    rate_bs_bps: float
    rate_d2d_bps: float
    iterations: int
    converged: bool
    baseline_rate_bps: float


FIELD_NAMES = tuple(f.name for f in fields(ResultRow))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _SIG % value
    return str(value)


def _dbm(p_watt: float) -> float:
    return 10.0 * math.log10(p_watt * 1e3)


def solve_point(scenario: Scenario, scenario_id: str) -> tuple[ResultRow, ResultRow]:
    """Optimized row and paired baseline row for one scenario."""
    system = scenario.system
    realization = realize_channel(scenario.channel, system.n_total, scenario.seed)
    element_report, module_report = run_pipeline(
        system, realization, scenario.epsilon, scenario.max_iters,
        m_star=scenario.m_star, k_star=scenario.k_star)
    base = solve_baseline(system, realization)

    alloc: ModuleAllocation = module_report.allocation
    row = ResultRow(
        scenario_id=scenario_id,
        seed=scenario.seed,
        n_total=system.n_total,
        zeta=system.zeta,
        amp_factor=system.amp_factor,
        t_frame_ms=system.t_frame * 1e3,
        t_eh_ms=module_report.schedule.t_eh * 1e3,
        t_d2d_ms=module_report.schedule.t_d2d * 1e3,
        m_star=alloc.m_star,
        k_star=alloc.k_star,
        ma=alloc.ma,
        kp=alloc.kp,
        microcontrollers=alloc.microcontrollers,
        p_b_dbm=_dbm(module_report.p_b),
        harvested_mj=module_report.harvested_energy * 1e3,
        ris_energy_mj=module_report.ris_energy * 1e3,
        rate_bs_bps=module_report.rate_bs,
        rate_d2d_bps=module_report.rate_d2d,
        iterations=module_report.iterations,
        converged=element_report.converged and module_report.converged,
        baseline_rate_bps=base.rate_d2d,
    )
    base_row = ResultRow(
        scenario_id=scenario_id + ":baseline",
        seed=scenario.seed,
        n_total=system.n_total,
        zeta=system.zeta,
        amp_factor=system.amp_factor,
        t_frame_ms=system.t_frame * 1e3,
        t_eh_ms=base.schedule.t_eh * 1e3,
        t_d2d_ms=base.schedule.t_d2d * 1e3,
        m_star=0, k_star=0, ma=0, kp=0, microcontrollers=0,
        p_b_dbm=_dbm(base.p_b),
        harvested_mj=base.harvested * 1e3,
        ris_energy_mj=0.0,
        rate_bs_bps=base.rate_bs,
        rate_d2d_bps=base.rate_d2d,
        iterations=0,
        converged=True,
        baseline_rate_bps=base.rate_d2d,
    )
    return row, base_row


def run_sweep(spec: SweepSpec) -> list[ResultRow]:
    """All rows of the sweep, axis-major then repetition, seeds paired."""
    rows: list[ResultRow] = []
    for value in spec.values:
        scenario = apply_axis(spec.scenario, spec.axis, value)
        for rep in range(spec.repetitions):
            seeded = dataclasses.replace(scenario, seed=scenario.seed + rep)
            sid = f"{spec.label}:{spec.axis}={value:g}:r{rep}"
            main, base = solve_point(seeded, sid)
            rows.append(main)
            rows.append(base)
    return rows


def rows_to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(FIELD_NAMES)
    for row in rows:
        writer.writerow([_fmt(getattr(row, name)) for name in FIELD_NAMES])
    return buf.getvalue()


def write_csv(rows: list[ResultRow], path: str | Path) -> None:
    Path(path).write_text(rows_to_csv(rows), newline="")


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return list(reader)


def _need(record: dict[str, str], *names: str) -> None:
    for name in names:
        if name not in record:
            raise MissingColumn(f"results file lacks column {name!r}")


def _is_baseline(record: dict[str, str]) -> bool:
    return record["scenario_id"].endswith(":baseline")


def _group_mean(records: list[dict[str, str]], x_col: str,
                y_col: str) -> list[tuple[float, float]]:
    groups: dict[float, list[float]] = {}
    for r in records:
        groups.setdefault(float(r[x_col]), []).append(float(r[y_col]))
    return [(x, sum(v) / len(v)) for x, v in sorted(groups.items())]


def trend_summary(rows: list[ResultRow], axis_col: str) -> list[str]:
    """Per-axis-value means of the headline quantities, one line each."""
    main = [r for r in rows if not r.scenario_id.endswith(":baseline")]
    if not main:
        return ["no rows"]
    lines = []
    for y, tag in (("harvested_mj", "mean harvested mJ"),
                   ("ris_energy_mj", "mean surface energy mJ"),
                   ("m_star", "mean amplifying module size"),
                   ("microcontrollers", "mean microcontrollers"),
                   ("t_eh_ms", "mean harvest slot ms"),
                   ("t_d2d_ms", "mean transmit slot ms"),
                   ("rate_d2d_bps", "mean D2D rate b/s")):
        groups: dict[float, list[float]] = {}
        for r in main:
            groups.setdefault(float(getattr(r, axis_col)), []).append(
                float(getattr(r, y)))
        body = "  ".join(f"{x:g}:{_SIG % (sum(v) / len(v))}"
                         for x, v in sorted(groups.items()))
        lines.append(f"{tag} by {axis_col}: {body}")
    return lines


_AXIS_COLUMN = {"zeta": "zeta", "amp_factor": "amp_factor",
                "t_frame": "t_frame_ms", "n_total": "n_total"}


def axis_column(axis: str) -> str:
    return _AXIS_COLUMN.get(axis, axis)


FIGURES = ("convergence", "timesplit", "harvest", "elements",
           "microcontrollers", "rates")


def emit_plotdata(source: str | Path, figure: str) -> str:
    """Figure-ready CSV (x, y, series) from a results CSV or a solve report."""
    if figure not in FIGURES:
        raise ParseError(f"unknown figure {figure!r}; choose from {FIGURES}")
    if figure == "convergence":
        report = json.loads(Path(source).read_text())
        out = [("iteration", "objective_mj", "stage")]
        for stage in ("element", "module"):
            if stage not in report:
                raise MissingColumn(f"report lacks {stage!r} stage trace")
            for i, obj in enumerate(report[stage]["trace"], start=1):
                out.append((str(i), _SIG % (obj * 1e3), stage))
        return "\r\n".join(",".join(r) for r in out) + "\r\n"

    records = read_csv(source)
    if not records:
        raise MissingColumn("results file has no rows")
    _need(records[0], "scenario_id")
    main = [r for r in records if not _is_baseline(r)]

    def table(x_col: str, series: list[tuple[str, str, list[dict]]],
              header: tuple[str, str, str]) -> str:
        _need(records[0], x_col)
        out = [header]
        for y_col, name, recs in series:
            _need(records[0], y_col)
            for x, v in _group_mean(recs, x_col, y_col):
                out.append((_SIG % x, _SIG % v, name))
        return "\r\n".join(",".join(r) for r in out) + "\r\n"

    if figure == "timesplit":
        return table("t_frame_ms",
                     [("t_eh_ms", "harvest", main), ("t_d2d_ms", "transmit", main)],
                     ("t_frame_ms", "mean_slot_ms", "slot"))
    if figure == "harvest":
        _need(records[0], "zeta")
        zetas = sorted({r["zeta"] for r in main}, key=float)
        series = [("harvested_mj", f"zeta={z}",
                   [r for r in main if r["zeta"] == z]) for z in zetas]
        return table("t_frame_ms", series,
                     ("t_frame_ms", "mean_harvested_mj", "series"))
    if figure == "elements":
        return table("amp_factor",
                     [("m_star", "amplifying", main), ("k_star", "passive", main)],
                     ("amp_factor", "mean_module_size", "kind"))
    if figure == "microcontrollers":
        return table("n_total",
                     [("ma", "amplifying", main), ("kp", "passive", main),
                      ("microcontrollers", "total", main)],
                     ("n_total", "mean_modules", "kind"))
    return table("amp_factor",
                 [("rate_d2d_bps", "surface", main),
                  ("baseline_rate_bps", "baseline", main)],
                 ("amp_factor", "mean_rate_bps", "series"))
