"""Positive-flow paths and the harmonic flow tree.

Following any outgoing positive flow strictly lowers the potential, so every
such walk is loop-free and ends at the target. The tree of all of these walks
from the start vertex is the harmonic flow tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .graph import Path, WeightedGraph
from .solver import FlowAssignment

__all__ = [
    "FlowTraceError",
    "FlowCycleError",
    "TreeTooLargeError",
    "HFTNode",
    "HarmonicFlowTree",
    "max_flow_chooser",
    "trace_positive_path",
    "build_hft",
]

Chooser = Callable[[int, Sequence[tuple[int, float]]], int]

DEFAULT_NODE_CAP = 1_000_000


class FlowTraceError(RuntimeError):
    """Flows are not a converged harmonic field (dead end or loop)."""


class FlowCycleError(FlowTraceError):
    pass


class TreeTooLargeError(RuntimeError):
    pass


def max_flow_chooser(vertex: int, candidates: Sequence[tuple[int, float]]) -> int:
    """Largest outgoing flow; lowest neighbor id on ties."""
    best, best_flow = candidates[0]
    for u, x in candidates[1:]:
        if x > best_flow:
            best, best_flow = u, x
    return best


def trace_positive_path(
    graph: WeightedGraph,
    flows: FlowAssignment,
    start: int,
    chooser: Chooser = max_flow_chooser,
) -> Path:
    target = graph.target
    route = [start]
    seen = {start}
    v = start
    while v != target:
        options = flows.positive_out(v)
        if not options:
            raise FlowTraceError(f"no outgoing positive flow at vertex {v}")
        v = chooser(v, options)
        if v in seen:
            raise FlowCycleError(f"positive-flow walk revisits vertex {v}: {route}")
        seen.add(v)
        route.append(v)
    return Path.from_vertices(graph, route)


@dataclass(frozen=True)
class HFTNode:
    vertex: int
    edge_cost: float  # cost of the edge from the parent; 0 at the root
    depth_cost: float  # cumulative cost from the root
    children: tuple["HFTNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class HarmonicFlowTree:
    root: HFTNode
    leaf_count: int
    node_count: int

    def branches(self) -> Iterator[Path]:
        """Root-to-leaf paths in depth-first, ascending-id order."""
        stack: list[tuple[HFTNode, tuple[int, ...]]] = [(self.root, (self.root.vertex,))]
        while stack:
            node, prefix = stack.pop()
            if node.is_leaf:
                yield Path(prefix, node.depth_cost)
                continue
            for child in reversed(node.children):
                stack.append((child, prefix + (child.vertex,)))

    def nodes(self) -> Iterator[HFTNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def vertex_set(self) -> set[int]:
        return {node.vertex for node in self.nodes()}

    def render(self) -> str:
        """Indented text, one vertex per line followed by its cumulative cost."""
        lines = []
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            lines.append(f"{'  ' * depth}{node.vertex} {node.depth_cost:.6f}")
            stack.extend((c, depth + 1) for c in reversed(node.children))
        return "\n".join(lines) + "\n"


def build_hft(
    graph: WeightedGraph,
    flows: FlowAssignment,
    node_cap: int = DEFAULT_NODE_CAP,
) -> HarmonicFlowTree:
    target = graph.target
    count = 0
    leaves = 0
    on_branch: set[int] = set()

    def expand(v: int, edge_cost: float, depth_cost: float) -> HFTNode:
        nonlocal count, leaves
        count += 1
        if count > node_cap:
            raise TreeTooLargeError(f"harmonic flow tree exceeds {node_cap} nodes")
        if v == target:
            leaves += 1
            return HFTNode(v, edge_cost, depth_cost)
        options = flows.positive_out(v)
        if not options:
            raise FlowTraceError(f"no outgoing positive flow at vertex {v}")
        on_branch.add(v)
        children = []
        for u, _ in options:
            if u in on_branch:
                raise FlowCycleError(f"positive flow from {v} returns to {u}")
            c = graph.cost(v, u)
            children.append(expand(u, c, depth_cost + c))
        on_branch.discard(v)
        return HFTNode(v, edge_cost, depth_cost, tuple(children))

    root = expand(graph.source, 0.0, 0.0)
    return HarmonicFlowTree(root, leaves, count)
