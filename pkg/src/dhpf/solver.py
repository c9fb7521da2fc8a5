"""Discrete harmonic potentials, edge flows and equivalent costs.

The potential ``V`` on a weighted graph is pinned to 1 at the start vertex and
0 at the target; every other vertex balances its flows,

    sum_j (V_i - V_j) / C_ij = 0,

which rearranges to the update ``V_i = sum_k b_ik V_k`` with
``b_ik = (1/C_ik) / sum_m (1/C_im)``.  Two solvers are provided: ascending-id
Gauss-Seidel relaxation of that update, and a sparse direct solve of the
balance equations (the exact reference).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .graph import WeightedGraph, dead_end_anchors, is_connected_pair, reachable, route_core

__all__ = [
    "ITERATIVE",
    "DIRECT",
    "FLOW_EPSILON",
    "SolverConfig",
    "PotentialField",
    "FlowAssignment",
    "ConvergenceError",
    "InfiniteEquivalentCost",
    "solve_potentials",
    "solve_pinned",
    "compute_flows",
    "kcl_residual",
    "equivalent_cost",
    "update_weights",
]

ITERATIVE = "iterative"
DIRECT = "direct"
FLOATING_POTENTIAL = 0.5
FLOW_EPSILON = 1e-12


class ConvergenceError(RuntimeError):
    def __init__(self, iterations: int, change: float, residual: float):
        self.iterations = iterations
        self.change = change
        self.residual = residual
        super().__init__(
            f"relaxation did not converge after {iterations} sweeps "
            f"(last change {change:.3e}, residual {residual:.3e})"
        )


class InfiniteEquivalentCost(ValueError):
    def __init__(self, i: int, j: int):
        super().__init__(f"infinite equivalent cost: vertices {i} and {j} are disconnected")


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the potential solve.

    Relaxation stops once the largest per-sweep potential change, the
    extrapolated remaining change and the balance residual are all below
    ``tolerance``. ``init`` selects the starting interior value: ``"half"``
    (every free vertex at 1/2) or ``"random"`` (uniform on (0, 1) drawn from
    ``seed``). ``flow_epsilon`` is the smallest flow treated as positive.
    """

    tolerance: float = 1e-9
    max_iterations: int = 1_000_000
    method: str = ITERATIVE
    init: str = "half"
    seed: int | None = None
    flow_epsilon: float = FLOW_EPSILON

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.method not in (ITERATIVE, DIRECT):
            raise ValueError(f"unknown method {self.method!r}")
        if self.init not in ("half", "random"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.flow_epsilon < 0:
            raise ValueError("flow_epsilon must be nonnegative")


@dataclass(frozen=True)
class PotentialField:
    values: tuple[float, ...]  # values[v - 1] is the potential at vertex v
    source: int
    target: int
    residual: float
    iterations: int
    # potential differences up to twice this are below the solver's accuracy
    resolution: float = 0.0

    def __getitem__(self, v: int) -> float:
        if v < 1:
            raise KeyError(v)
        return self.values[v - 1]

    def __len__(self) -> int:
        return len(self.values)

    def as_dict(self) -> dict[int, float]:
        return {v: x for v, x in enumerate(self.values, start=1)}


@dataclass(frozen=True)
class FlowAssignment:
    """Signed edge flows; ``flow(i, j) == -flow(j, i)`` for every edge."""

    flows: Mapping[tuple[int, int], float]
    epsilon: float = FLOW_EPSILON
    _out: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        out: dict[int, list[tuple[int, float]]] = {}
        for (i, j), x in self.flows.items():
            out.setdefault(i, []).append((j, x))
        for row in out.values():
            row.sort()
        object.__setattr__(self, "_out", out)

    def flow(self, i: int, j: int) -> float:
        return self.flows[(i, j)]

    def __getitem__(self, edge: tuple[int, int]) -> float:
        return self.flows[edge]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.flows)

    def incident(self, v: int) -> list[tuple[int, float]]:
        """``(neighbor, flow v->neighbor)`` in ascending neighbor id."""
        return list(self._out.get(v, ()))

    def positive_out(self, v: int) -> list[tuple[int, float]]:
        return [(u, x) for u, x in self._out.get(v, ()) if x > self.epsilon]

    def positive_in(self, v: int) -> list[tuple[int, float]]:
        return [(u, -x) for u, x in self._out.get(v, ()) if -x > self.epsilon]

    def net_out(self, v: int) -> float:
        return math.fsum(x for _, x in self._out.get(v, ()))

    def oriented(self) -> list[tuple[int, int, float]]:
        """Each edge once, oriented from higher to lower potential."""
        rows = []
        for (i, j), x in self.flows.items():
            if x > 0 or (x == 0 and i < j):
                rows.append((i, j, x))
        return sorted(rows)


def update_weights(graph: WeightedGraph, v: int) -> list[tuple[int, float]]:
    """``(k, b_vk)`` for the relaxation update of vertex ``v``."""
    nbrs = graph.neighbors(v)
    total = math.fsum(1.0 / c for _, c in nbrs)
    return [(k, (1.0 / c) / total) for k, c in nbrs]


def _initial_values(n: int, free: list[int], config: SolverConfig) -> np.ndarray:
    values = np.full(n + 1, FLOATING_POTENTIAL)
    if config.init == "random":
        rng = np.random.default_rng(config.seed)
        draws = rng.uniform(0.0, 1.0, size=len(free))
        # keep draws inside the open interval
        draws[draws == 0.0] = 0.5
        values[free] = draws
    return values


def _remaining_error(change: float, prev: float) -> float:
    # geometric tail of the remaining updates, contraction estimated from the
    # last two sweeps
    if change == 0.0:
        return 0.0
    rho = change / prev if prev > 0 else 1.0
    if rho >= 1.0:
        return math.inf
    return change * rho / (1.0 - rho)


def _relax(graph, pinned, free, config) -> tuple[list[float], int]:
    values = _initial_values(graph.vertex_count, free, config).tolist()
    for v, x in pinned.items():
        values[v] = x
    rows = [(v, update_weights(graph, v)) for v in free]
    tol = config.tolerance
    change = prev = math.inf
    sweep = 0
    while sweep < config.max_iterations:
        sweep += 1
        prev, change = change, 0.0
        for v, weights in rows:
            new = 0.0
            for k, b in weights:
                new += b * values[k]
            d = abs(new - values[v])
            if d > change:
                change = d
            values[v] = new
        if change < tol and _remaining_error(change, prev) < tol:
            if _residual(graph, values, free) <= tol:
                return values, sweep
    residual = _residual(graph, values, free)
    raise ConvergenceError(sweep, change, residual)


def _direct(graph, pinned, free) -> list[float]:
    values = [FLOATING_POTENTIAL] * (graph.vertex_count + 1)
    for v, x in pinned.items():
        values[v] = x
    if not free:
        return values
    index = {v: k for k, v in enumerate(free)}
    rows, cols, data = [], [], []
    rhs = np.zeros(len(free))
    for v in free:
        r = index[v]
        diag = 0.0
        for k, c in graph.neighbors(v):
            g = 1.0 / c
            diag += g
            if k in index:
                rows.append(r)
                cols.append(index[k])
                data.append(-g)
            else:
                rhs[r] += g * values[k]
        rows.append(r)
        cols.append(r)
        data.append(diag)
    A = sparse.csr_matrix((data, (rows, cols)), shape=(len(free), len(free)))
    x = np.atleast_1d(spsolve(A, rhs))
    if not np.all(np.isfinite(x)):
        raise RuntimeError("singular balance system")  # unreachable for valid graphs
    for v, xv in zip(free, x):
        values[v] = float(xv)
    return values


def _residual(graph: WeightedGraph, values, free) -> float:
    worst = 0.0
    for v in free:
        r = abs(math.fsum((values[v] - values[k]) / c for k, c in graph.neighbors(v)))
        worst = max(worst, r)
    return worst


def solve_pinned(
    graph: WeightedGraph, pinned: Mapping[int, float], config: SolverConfig
) -> PotentialField:
    """Solve the balance equations with an arbitrary set of pinned vertices.

    Vertices outside the components containing a pinned vertex are left at
    1/2 and carry no flow. With exactly two pins, dead-end regions (vertices
    on no simple path between the pins) are solved exactly: each takes the
    potential of the vertex it hangs from, so their flows are exactly zero
    rather than relaxation noise.
    """
    pins = dict(pinned)
    live: set[int] = set()
    for v in pins:
        live |= reachable(graph, v)
    hung: dict[int, int] = {}
    work = graph
    if len(pins) == 2:
        a, b = pins
        core = route_core(graph, a, b)
        if core:
            hung = dead_end_anchors(graph, core)
            work = graph.without_edges(
                [(i, j) for i, j, _ in graph.edges if i not in core or j not in core]
            )
    free = [v for v in graph.vertices if v in live and v not in pins and v not in hung]
    if config.method == DIRECT:
        values, iterations = _direct(work, pins, free), 0
    else:
        values, iterations = _relax(work, pins, free, config)
    for v, anchor in hung.items():
        values[v] = values[anchor]
    residual = _residual(graph, values, free + sorted(hung))
    resolution = 0.0 if config.method == DIRECT else config.tolerance
    return PotentialField(
        tuple(values[1:]), graph.source, graph.target, residual, iterations, resolution
    )


def solve_potentials(
    graph: WeightedGraph, config: SolverConfig | None = None
) -> PotentialField:
    config = config or SolverConfig()
    graph.require_valid()
    return solve_pinned(graph, {graph.source: 1.0, graph.target: 0.0}, config)


def compute_flows(
    graph: WeightedGraph,
    potentials: PotentialField,
    epsilon: float = FLOW_EPSILON,
) -> FlowAssignment:
    """Edge flows ``(V_i - V_j) / C_ij``.

    An edge whose potential difference is within the field's resolution gets
    exactly zero flow: a relaxed solve cannot tell it from a balanced edge,
    and noise there would otherwise pass the positivity threshold.
    """
    gap = 2.0 * potentials.resolution
    flows: dict[tuple[int, int], float] = {}
    for i, j, c in graph.edge_list():
        d = potentials[i] - potentials[j]
        x = d / c if abs(d) > gap else 0.0
        flows[(i, j)] = x
        flows[(j, i)] = -x
    return FlowAssignment(flows, epsilon)


def kcl_residual(graph: WeightedGraph, potentials: PotentialField) -> float:
    """Largest flow imbalance over the vertices other than start and target."""
    interior = [v for v in graph.vertices if v not in (graph.source, graph.target)]
    values = (0.0,) + potentials.values
    return _residual(graph, values, interior)


def equivalent_cost(
    graph: WeightedGraph, i: int, j: int, config: SolverConfig | None = None
) -> float:
    """Potential difference over injected flow at the ``i``-``j`` port.

    The designated start and target of ``graph`` are ignored.
    """
    config = config or SolverConfig()
    if i == j:
        raise ValueError("port vertices must differ")
    for v in (i, j):
        if not graph.has_vertex(v):
            raise KeyError(f"unknown vertex id {v}")
    if not is_connected_pair(graph, i, j):
        raise InfiniteEquivalentCost(i, j)
    field_ = solve_pinned(graph.with_terminals(i, j), {i: 1.0, j: 0.0}, config)
    injected = math.fsum((1.0 - field_[k]) / c for k, c in graph.neighbors(i))
    return 1.0 / injected
