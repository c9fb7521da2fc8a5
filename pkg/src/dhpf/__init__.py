"""Path planning and routing with discrete harmonic potential fields."""

from .astar import astar_equivcost, equivalent_cost_heuristic, equivcost_search
from .flowtree import HarmonicFlowTree, build_hft, trace_positive_path
from .graph import Path, WeightedGraph, neighbors, parse_graph, read_graph, serialize_graph, validate
from .mstar import compute_flow_indices, mstar_direct, mstar_indirect
from .routing import SimConfig, SimulationTrace, run_decentralized, run_trials
from .solver import (
    FlowAssignment,
    PotentialField,
    SolverConfig,
    compute_flows,
    equivalent_cost,
    kcl_residual,
    solve_potentials,
)

__version__ = "0.1.0"

__all__ = [
    "FlowAssignment",
    "HarmonicFlowTree",
    "Path",
    "PotentialField",
    "SimConfig",
    "SimulationTrace",
    "SolverConfig",
    "WeightedGraph",
    "astar_equivcost",
    "build_hft",
    "compute_flow_indices",
    "compute_flows",
    "equivalent_cost",
    "equivalent_cost_heuristic",
    "equivcost_search",
    "kcl_residual",
    "mstar_direct",
    "mstar_indirect",
    "neighbors",
    "parse_graph",
    "read_graph",
    "run_decentralized",
    "run_trials",
    "serialize_graph",
    "solve_potentials",
    "trace_positive_path",
    "validate",
]
