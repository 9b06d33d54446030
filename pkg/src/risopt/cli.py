"""Command line front end.

Verbs: solve one scenario, sweep an axis, reshape results for figures, and
run the exhaustive small-panel check.  Exit code 0 on success, 2 when the
scenario is infeasible, 1 on any other error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from . import oracle as oracle_mod
from . import sweep as sweep_mod
from .allocation import ModuleAllocation, SolveReport
from .baseline import solve_baseline
from .channel import realize_channel
from .config_io import load_scenario, load_sweep_spec
from .errors import Infeasible, RisOptError
from .module_opt import run_pipeline


def _dbm(p_watt: float) -> float:
    return 10.0 * math.log10(p_watt * 1e3)


def _report_dict(report: SolveReport) -> dict:
    alloc = report.allocation
    if isinstance(alloc, ModuleAllocation):
        counts = {"m_star": alloc.m_star, "k_star": alloc.k_star,
                  "ma": alloc.ma, "kp": alloc.kp,
                  "ma_eh": alloc.ma_eh, "kp_eh": alloc.kp_eh,
                  "ma_d2d": alloc.ma_d2d, "kp_d2d": alloc.kp_d2d,
                  "microcontrollers": alloc.microcontrollers}
    else:
        counts = {"m": alloc.m, "k": alloc.k, "m_eh": alloc.m_eh,
                  "k_eh": alloc.k_eh, "m_d2d": alloc.m_d2d, "k_d2d": alloc.k_d2d}
    return {**counts,
            "t_eh_s": report.schedule.t_eh,
            "t_d2d_s": report.schedule.t_d2d,
            "p_b_w": report.p_b,
            "harvested_j": report.harvested_energy,
            "ris_energy_j": report.ris_energy,
            "rate_bs_bps": report.rate_bs,
            "rate_d2d_bps": report.rate_d2d,
            "iterations": report.iterations,
            "converged": report.converged,
            "trace": list(report.trace)}


def _cmd_solve(args: argparse.Namespace) -> int:
    scenario = _load_with_overrides(args)
    system = scenario.system
    realization = realize_channel(scenario.channel, system.n_total, scenario.seed)
    element_report, module_report = run_pipeline(
        system, realization, scenario.epsilon, scenario.max_iters,
        m_star=scenario.m_star, k_star=scenario.k_star)
    base = solve_baseline(system, realization)

    for name, rep in (("element", element_report), ("module", module_report)):
        alloc = rep.allocation
        if isinstance(alloc, ModuleAllocation):
            head = (f"modules {alloc.ma} amplifying x{alloc.m_star} + "
                    f"{alloc.kp} passive x{alloc.k_star} "
                    f"({alloc.microcontrollers} microcontrollers)")
        else:
            head = f"elements {alloc.m} amplifying + {alloc.k} passive"
        print(f"[{name}] {head}")
        print(f"[{name}] slots {rep.schedule.t_eh * 1e3:.3f} ms harvest / "
              f"{rep.schedule.t_d2d * 1e3:.3f} ms transmit, "
              f"p_b {_dbm(rep.p_b):.2f} dBm")
        print(f"[{name}] harvested {rep.harvested_energy * 1e3:.4f} mJ, "
              f"surface energy {rep.ris_energy * 1e3:.6f} mJ, "
              f"d2d rate {rep.rate_d2d:.1f} b/s")
        print(f"[{name}] iterations {rep.iterations}, converged {rep.converged}")
    gain = module_report.rate_d2d / base.rate_d2d if base.rate_d2d > 0 else math.inf
    print(f"[baseline] d2d rate {base.rate_d2d:.1f} b/s, "
          f"p_b {_dbm(base.p_b):.2f} dBm (surface gain x{gain:.2f})")

    if args.out:
        payload = {
            "scenario": {"seed": scenario.seed, "n_total": system.n_total,
                         "zeta": system.zeta, "amp_factor": system.amp_factor,
                         "t_frame_s": system.t_frame,
                         "epsilon": scenario.epsilon,
                         "max_iters": scenario.max_iters},
            "element": _report_dict(element_report),
            "module": _report_dict(module_report),
            "baseline": {"t_eh_s": base.schedule.t_eh,
                         "t_d2d_s": base.schedule.t_d2d,
                         "p_b_w": base.p_b,
                         "harvested_j": base.harvested,
                         "rate_bs_bps": base.rate_bs,
                         "rate_d2d_bps": base.rate_d2d},
        }
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True))
        print(f"report written to {args.out}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = load_sweep_spec(args.spec)
    if args.seed is not None:
        spec = dataclasses.replace(
            spec, scenario=dataclasses.replace(spec.scenario, seed=args.seed))
    rows = sweep_mod.run_sweep(spec)
    out = args.out or f"{spec.label}_sweep.csv"
    sweep_mod.write_csv(rows, out)
    print(f"{len(rows)} rows written to {out}")
    for line in sweep_mod.trend_summary(rows, sweep_mod.axis_column(spec.axis)):
        print(line)
    return 0


def _cmd_plotdata(args: argparse.Namespace) -> int:
    text = sweep_mod.emit_plotdata(args.results, args.figure)
    if args.out:
        Path(args.out).write_text(text, newline="")
        print(f"figure data written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    scenario = _load_with_overrides(args)
    system = scenario.system
    realization = realize_channel(scenario.channel, system.n_total, scenario.seed)
    if args.module:
        m_star = scenario.m_star or 1
        k_star = scenario.k_star or 1
        res = oracle_mod.brute_force_module(system, realization, m_star, k_star,
                                            args.time_grid, args.power_grid)
    else:
        res = oracle_mod.brute_force_element(system, realization,
                                             args.time_grid, args.power_grid)
    alloc = res.allocation
    if isinstance(alloc, ModuleAllocation):
        head = (f"ma={alloc.ma} kp={alloc.kp} "
                f"(eh {alloc.ma_eh}/{alloc.kp_eh}, d2d {alloc.ma_d2d}/{alloc.kp_d2d})")
    else:
        head = (f"m={alloc.m} k={alloc.k} "
                f"(eh {alloc.m_eh}/{alloc.k_eh}, d2d {alloc.m_d2d}/{alloc.k_d2d})")
    print(f"oracle objective {res.objective * 1e3:.9f} mJ at {head}, "
          f"t_eh {res.schedule.t_eh * 1e3:.3f} ms, p_b {_dbm(res.p_b):.2f} dBm "
          f"({res.n_feasible} feasible grid points)")
    return 0


def _load_with_overrides(args: argparse.Namespace):
    scenario = load_scenario(args.config)
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "max_iters", None) is not None:
        updates["max_iters"] = args.max_iters
    if getattr(args, "epsilon", None) is not None:
        updates["epsilon"] = args.epsilon
    return dataclasses.replace(scenario, **updates) if updates else scenario


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risopt",
        description="Energy-minimizing switch scheduling for an amplifying "
                    "reflective surface assisting a batteryless link.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="optimize one scenario")
    p_solve.add_argument("config")
    p_solve.add_argument("--seed", type=int)
    p_solve.add_argument("--out", help="write a JSON report here")
    p_solve.add_argument("--max-iters", type=int, dest="max_iters")
    p_solve.add_argument("--epsilon", type=float)
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run a seeded parameter sweep")
    p_sweep.add_argument("spec")
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--out", help="output CSV path")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_plot = sub.add_parser("plotdata", help="aggregate results for a figure")
    p_plot.add_argument("results", help="sweep CSV, or solve JSON for convergence")
    p_plot.add_argument("--figure", required=True, choices=sweep_mod.FIGURES)
    p_plot.add_argument("--out")
    p_plot.set_defaults(func=_cmd_plotdata)

    p_oracle = sub.add_parser("oracle", help="exhaustive check (small panels)")
    p_oracle.add_argument("config")
    p_oracle.add_argument("--seed", type=int)
    p_oracle.add_argument("--module", action="store_true",
                          help="module scenario instead of per-element")
    p_oracle.add_argument("--time-grid", type=int, default=200, dest="time_grid")
    p_oracle.add_argument("--power-grid", type=int, default=200, dest="power_grid")
    p_oracle.set_defaults(func=_cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except (RisOptError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
