"""M*: optimal start-to-target paths read off a harmonic flow field.

Two realizations are provided. ``mstar_direct`` builds the harmonic flow tree
and prunes it bottom-up, keeping the cheapest sub-branch under every parent.
``mstar_indirect`` never builds the tree; it relaxes the positive-flow graph in
place using per-vertex counts of outgoing (PFI) and incoming (NFI) positive
flows until only one chain is left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .flowtree import DEFAULT_NODE_CAP, HFTNode, HarmonicFlowTree, build_hft
from .graph import Path, WeightedGraph
from .solver import (
    FlowAssignment,
    SolverConfig,
    compute_flows,
    solve_pinned,
    solve_potentials,
)

__all__ = [
    "FlowIndexTable",
    "RelaxationError",
    "TraceEvent",
    "JunctionEvent",
    "CascadeEvent",
    "compute_flow_indices",
    "prune_hft",
    "mstar_direct",
    "mstar_indirect",
]


class RelaxationError(RuntimeError):
    """Index bookkeeping in the indirect realization went inconsistent."""


@dataclass(frozen=True)
class FlowIndexTable:
    pfi: dict[int, int]
    nfi: dict[int, int]


def compute_flow_indices(graph: WeightedGraph, flows: FlowAssignment) -> FlowIndexTable:
    pfi = {v: len(flows.positive_out(v)) for v in graph.vertices}
    nfi = {v: len(flows.positive_in(v)) for v in graph.vertices}
    return FlowIndexTable(pfi, nfi)


def _best_branch(node: HFTNode) -> tuple[float, HFTNode]:
    """Cheapest node-to-leaf continuation with its remaining cost."""
    if node.is_leaf:
        return 0.0, node
    best = None
    for child in node.children:  # ascending vertex id, so ties keep the lowest
        rest, pruned = _best_branch(child)
        total = child.edge_cost + rest
        if best is None or total < best[0]:
            best = (total, pruned)
    kept = HFTNode(node.vertex, node.edge_cost, node.depth_cost, (best[1],))
    return best[0], kept


def prune_hft(tree: HarmonicFlowTree) -> HarmonicFlowTree:
    """Keep only the cheapest sub-branch under every parent, deepest first."""
    _, root = _best_branch(tree.root)
    size, node = 1, root
    while node.children:
        node = node.children[0]
        size += 1
    return HarmonicFlowTree(root, 1, size)


def mstar_direct(
    graph: WeightedGraph,
    config: SolverConfig | None = None,
    node_cap: int = DEFAULT_NODE_CAP,
) -> Path:
    config = config or SolverConfig()
    potentials = solve_potentials(graph, config)
    flows = compute_flows(graph, potentials, config.flow_epsilon)
    tree = build_hft(graph, flows, node_cap)
    branch = next(prune_hft(tree).branches())
    return Path.from_vertices(graph, branch.vertices)


# -- indirect realization ---------------------------------------------------


@dataclass(frozen=True)
class TraceEvent:
    """Backward trace from the target that located ``junction``."""

    traced: tuple[int, ...]
    junction: int | None


@dataclass(frozen=True)
class JunctionEvent:
    junction: int
    routes: tuple[tuple[tuple[int, ...], float], ...]
    kept: tuple[int, ...]
    deleted: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class CascadeEvent:
    vertex: int
    deleted: tuple[int, int]


@dataclass
class _Working:
    """Mutable positive-flow graph with its flow indices."""

    graph: WeightedGraph
    flows: FlowAssignment
    out: dict[int, list[int]] = field(default_factory=dict)
    into: dict[int, list[int]] = field(default_factory=dict)
    pfi: dict[int, int] = field(default_factory=dict)
    nfi: dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_flows(cls, graph: WeightedGraph, flows: FlowAssignment) -> "_Working":
        w = cls(graph, flows)
        for v in graph.vertices:
            w.out[v] = [u for u, _ in flows.positive_out(v)]
            w.into[v] = [u for u, _ in flows.positive_in(v)]
        table = compute_flow_indices(graph, flows)
        w.pfi, w.nfi = dict(table.pfi), dict(table.nfi)
        return w

    def delete(self, v: int, u: int) -> None:
        self.out[v].remove(u)
        self.into[u].remove(v)

    def check(self) -> None:
        for v in self.graph.vertices:
            if self.pfi[v] != len(self.out[v]) or self.nfi[v] != len(self.into[v]):
                raise RelaxationError(
                    f"index mismatch at vertex {v}: pfi={self.pfi[v]}/{len(self.out[v])} "
                    f"nfi={self.nfi[v]}/{len(self.into[v])}"
                )

    def remaining_edges(self) -> list[tuple[int, int]]:
        return [(v, u) for v in self.graph.vertices for u in self.out[v]]


def _backward_trace(w: _Working) -> TraceEvent:
    # strongest remaining inflow at every step, lowest id on ties
    s, t = w.graph.source, w.graph.target
    traced = [t]
    v = t
    while True:
        preds = w.into[v]
        if not preds:
            return TraceEvent(tuple(traced), None)
        u = max(preds, key=lambda p: (w.flows.flow(p, v), -p))
        traced.append(u)
        if w.pfi[u] >= 2:
            return TraceEvent(tuple(traced), u)
        if u == s:
            return TraceEvent(tuple(traced), None)
        v = u


def _forward_routes(w: _Working, junction: int):
    """Routes from ``junction`` through PFI=1 vertices.

    Returns ``(routes, deeper)`` where ``deeper`` is the first vertex with
    PFI >= 2 met by some route, or None when every route reached the target.
    """
    t = w.graph.target
    routes = []
    for first in sorted(w.out[junction]):
        route = [junction, first]
        cost = w.graph.cost(junction, first)
        v = first
        while v != t:
            if w.pfi[v] >= 2:
                return routes, v
            if w.pfi[v] == 0:
                raise RelaxationError(f"route from {junction} dead-ends at {v}")
            nxt = w.out[v][0]
            cost += w.graph.cost(v, nxt)
            route.append(nxt)
            v = nxt
            if len(route) > w.graph.vertex_count:
                raise RelaxationError(f"route from {junction} loops: {route}")
        routes.append((tuple(route), cost))
    return routes, None


def _cascade(w: _Working, start: list[int], log: list | None) -> None:
    s = w.graph.source
    pending = list(start)
    while pending:
        v = pending.pop(0)
        if v == s or w.nfi[v] != 0 or not w.out[v]:
            continue
        for u in list(w.out[v]):
            w.delete(v, u)
            w.pfi[v] -= 1
            w.nfi[u] -= 1
            if log is not None:
                log.append(CascadeEvent(v, (v, u)))
            pending.append(u)


def _resolve(graph: WeightedGraph, w: _Working, strict: bool, config) -> _Working:
    """Re-solve the field on the remaining edges (strict mode only)."""
    if not strict:
        return w
    kept = {frozenset(e) for e in w.remaining_edges()}
    sub = WeightedGraph(
        graph.vertex_count,
        tuple(e for e in graph.edge_list() if frozenset(e[:2]) in kept),
        graph.source,
        graph.target,
    )
    field_ = solve_pinned(sub, {sub.source: 1.0, sub.target: 0.0}, config)
    fresh = _Working.from_flows(sub, compute_flows(sub, field_, config.flow_epsilon))
    _cascade(fresh, list(graph.vertices), None)
    return fresh


def mstar_indirect(
    graph: WeightedGraph,
    config: SolverConfig | None = None,
    *,
    strict: bool = False,
    log: list | None = None,
) -> Path:
    """Successive relaxation of the positive-flow graph.

    Each round traces back from the target along the strongest inflows to the
    nearest junction (PFI >= 2). If some forward route from that junction runs
    into a deeper junction, the deeper one is handled first. At a junction
    whose routes all reach the target, the first edges of every route but the
    cheapest are deleted, then vertices left without inflow (other than the
    start) lose their outgoing edges in cascade. ``log`` collects
    :class:`TraceEvent`, :class:`JunctionEvent` and :class:`CascadeEvent`
    records. With ``strict`` the flow field is re-solved after every round.
    """
    config = config or SolverConfig()
    potentials = solve_potentials(graph, config)
    flows = compute_flows(graph, potentials, config.flow_epsilon)
    w = _Working.from_flows(graph, flows)
    _cascade(w, list(graph.vertices), log)
    w.check()

    s, t = graph.source, graph.target
    n = graph.vertex_count
    for _ in range(max(n * n, 1)):
        trace = _backward_trace(w)
        if log is not None:
            log.append(trace)
        junction = trace.junction
        if junction is None:
            break
        for _ in range(n):
            routes, deeper = _forward_routes(w, junction)
            if deeper is None:
                break
            junction = deeper
        else:
            raise RelaxationError("junction descent did not settle")
        best = min(range(len(routes)), key=lambda k: (routes[k][1], routes[k][0][1]))
        deleted = []
        for k, (route, _) in enumerate(routes):
            if k == best:
                continue
            first = route[1]
            w.delete(junction, first)
            w.pfi[junction] -= 1
            w.nfi[first] -= 1
            deleted.append((junction, first))
        if log is not None:
            log.append(JunctionEvent(junction, tuple(routes), routes[best][0], tuple(deleted)))
        _cascade(w, [e[1] for e in deleted], log)
        w.check()
        w = _resolve(graph, w, strict, config)
    else:
        raise RelaxationError(f"relaxation did not terminate within {n * n} rounds")

    chain = [s]
    v = s
    while v != t:
        if w.pfi[v] != 1:
            raise RelaxationError(f"relaxed graph is not a single chain at vertex {v}")
        v = w.out[v][0]
        chain.append(v)
        if len(chain) > n:
            raise RelaxationError("relaxed chain loops")
    if w.nfi[s] != 0 or w.nfi[t] != 1 or w.pfi[t] != 0:
        raise RelaxationError("relaxed chain has inconsistent terminal indices")
    return Path.from_vertices(graph, chain)
