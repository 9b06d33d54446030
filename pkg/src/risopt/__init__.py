"""Energy-optimal switch scheduling for an amplifying reflective surface
assisting a batteryless device-to-device link."""

from .allocation import (ElementAllocation, ModuleAllocation, Schedule,
                         SolveReport)
from .baseline import BaselineResult, solve_baseline
from .channel import ChannelRealization, realize_channel
from .config_io import (Scenario, SweepSpec, apply_axis, load_scenario,
                        load_sweep_spec)
from .element_opt import run_algorithm1
from .errors import (DomainError, Infeasible, InfeasibleLinearization,
                     InvalidParam, MissingColumn, NoFeasiblePoint, ParseError,
                     RisOptError, RoundingFailed, Unbounded)
from .evaluate import FeasibilityReport, feasibility, objective_exact
from .module_opt import run_algorithm2, run_pipeline
from .oracle import OracleResult, brute_force_element, brute_force_module
from .params import ChannelParams, SystemParams

__version__ = "0.1.0"

__all__ = [
    "BaselineResult", "ChannelParams", "ChannelRealization",
    "DomainError", "ElementAllocation", "FeasibilityReport", "Infeasible",
    "InfeasibleLinearization", "InvalidParam", "MissingColumn",
    "ModuleAllocation", "NoFeasiblePoint", "OracleResult", "ParseError",
    "RisOptError", "RoundingFailed", "Scenario", "Schedule", "SolveReport",
    "SweepSpec", "SystemParams", "Unbounded", "apply_axis",
    "brute_force_element", "brute_force_module", "feasibility",
    "load_scenario", "load_sweep_spec", "objective_exact", "realize_channel",
    "run_algorithm1", "run_algorithm2", "run_pipeline", "solve_baseline",
]
