"""Command-line front end.

Exit codes: 0 success, 1 unreadable/invalid input or bad arguments,
2 relaxation did not converge, 3 disconnected equivalent-cost port.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path as FsPath

from .astar import astar_equivcost
from .flowtree import FlowTraceError, TreeTooLargeError, build_hft, trace_positive_path
from .graph import GraphFormatError, InvalidGraphError, WeightedGraph, parse_graph
from .mstar import RelaxationError, mstar_direct, mstar_indirect
from .routing import SimConfig, format_histogram, format_trace, run_trials
from .solver import (
    ConvergenceError,
    InfiniteEquivalentCost,
    SolverConfig,
    compute_flows,
    equivalent_cost,
    solve_potentials,
)

EXIT_INPUT = 1
EXIT_CONVERGENCE = 2
EXIT_DISCONNECTED = 3

ALGORITHMS = ("mstar-direct", "mstar-indirect", "astar", "trace")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _load(path: str) -> WeightedGraph:
    try:
        text = FsPath(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_INPUT) from None
    try:
        return parse_graph(text)
    except (GraphFormatError, InvalidGraphError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from None


def _solver_config(args) -> SolverConfig:
    try:
        return SolverConfig(tolerance=args.tolerance, method=args.method)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None


def cmd_solve(args) -> str:
    graph = _load(args.graph)
    potentials = solve_potentials(graph, _solver_config(args))
    flows = compute_flows(graph, potentials)
    lines = [f"{v} {_fmt(potentials[v])}" for v in graph.vertices]
    lines += [f"{i} {j} {_fmt(x)}" for i, j, x in flows.oriented()]
    lines.append(f"residual {potentials.residual:.6e}")
    lines.append(f"iterations {potentials.iterations}")
    return "\n".join(lines) + "\n"


def cmd_path(args) -> str:
    graph = _load(args.graph)
    config = _solver_config(args)
    if args.algorithm == "mstar-direct":
        path = mstar_direct(graph, config)
    elif args.algorithm == "mstar-indirect":
        path = mstar_indirect(graph, config)
    elif args.algorithm == "astar":
        path = astar_equivcost(graph, config)
    else:
        flows = compute_flows(graph, solve_potentials(graph, config), config.flow_epsilon)
        path = trace_positive_path(graph, flows, graph.source)
    text = f"path: {path}\ncost: {_fmt(path.cost)}\n"
    if args.show_tree:
        flows = compute_flows(graph, solve_potentials(graph, config), config.flow_epsilon)
        text += "tree\n" + build_hft(graph, flows).render()
    return text


def cmd_equivcost(args) -> str:
    graph = _load(args.graph)
    for v in (args.i, args.j):
        if not graph.has_vertex(v):
            raise CliError(f"unknown vertex id {v}", EXIT_INPUT)
    if args.i == args.j:
        raise CliError("port vertices must differ", EXIT_INPUT)
    try:
        value = equivalent_cost(graph, args.i, args.j, _solver_config(args))
    except InfiniteEquivalentCost as exc:
        raise CliError(str(exc), EXIT_DISCONNECTED) from None
    return _fmt(value) + "\n"


def cmd_simulate(args) -> str:
    graph = _load(args.graph)
    try:
        config = SimConfig(
            sweeps_per_hop=args.sweeps,
            failure_mode=args.failure,
            failure_duration=args.duration,
            rng_seed=args.seed,
            max_hops=args.max_hops,
            pinning=args.pinning,
        )
        if args.trials < 1:
            raise ValueError("trials must be at least 1")
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    stats = run_trials(graph, config, args.trials)
    if args.trace_dir:
        out = FsPath(args.trace_dir)
        out.mkdir(parents=True, exist_ok=True)
        width = len(str(args.trials - 1))
        for k, trace in enumerate(stats.traces):
            (out / f"trace_{k:0{width}d}.tsv").write_text(format_trace(trace), encoding="utf-8")
        (out / "histogram.txt").write_text(format_histogram(stats), encoding="utf-8")
    lines = [
        f"trials {args.trials}",
        f"delivered {sum(stats.delivered)}",
        f"delivery rate: {stats.delivery_rate:.2f}",
    ]
    report = "\n".join(lines) + "\n"
    if args.trials == 1:
        report += format_trace(stats.traces[0])
    report += "histogram\n" + format_histogram(stats)
    return report


def cmd_validate(args) -> str:
    graph = _load(args.graph)
    return f"valid: {graph.vertex_count} vertices, {graph.edge_count} edges\n"


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("graph", help="graph file")
    common.add_argument("--method", choices=("iterative", "direct"), default="iterative")
    common.add_argument("--tolerance", type=float, default=SolverConfig.tolerance)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", help="write results here instead of stdout")

    parser = _Parser(prog="dhpf", description="Planning with discrete harmonic potentials.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="potentials, flows and residual")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("path", parents=[common], help="start-to-target path")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="mstar-direct")
    p.add_argument("--show-tree", action="store_true", help="also print the harmonic flow tree")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("equivcost", parents=[common], help="equivalent cost of a vertex port")
    p.add_argument("i", type=int)
    p.add_argument("j", type=int)
    p.set_defaults(func=cmd_equivcost)

    p = sub.add_parser("simulate", parents=[common], help="decentralized routing trials")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--failure", choices=("none", "random"), default="none")
    p.add_argument("--duration", choices=("transient", "permanent"), default="transient")
    p.add_argument("--sweeps", type=int, default=SimConfig.sweeps_per_hop)
    p.add_argument("--max-hops", type=int, default=SimConfig.max_hops)
    p.add_argument("--pinning", choices=("origin", "holder", "trail"), default=SimConfig.pinning)
    p.add_argument("--trace-dir", help="write per-trial traces and histogram.txt here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", parents=[common], help="parse and validate a graph file")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        text = args.func(args)
    except CliError as exc:
        print(f"dhpf: {exc}", file=sys.stderr)
        return exc.code
    except ConvergenceError as exc:
        print(f"dhpf: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (FlowTraceError, RelaxationError, TreeTooLargeError) as exc:
        print(f"dhpf: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    if args.output:
        FsPath(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
