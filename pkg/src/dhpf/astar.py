"""A* with equivalent-cost lower bounds.

The equivalent cost between two vertices never exceeds the cost of any path
joining them, so it is an admissible estimate of the remaining cost. When the
search moves from ``p`` to a candidate ``c`` the estimate is taken on the graph
with every other edge at ``p`` removed: pin ``V_p = 1``, ``V_T = 0``, solve, and
read ``1 / I_pc - C_pc`` off the single remaining edge.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable

from .graph import Path, WeightedGraph, is_connected_pair
from .solver import SolverConfig, equivalent_cost, solve_pinned

__all__ = [
    "SearchNode",
    "SearchResult",
    "SearchExhausted",
    "equivalent_cost_heuristic",
    "astar",
    "astar_equivcost",
    "equivcost_search",
    "uniform_cost_search",
]


class SearchExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchNode:
    vertex: int
    g: float
    h: float
    parent: "SearchNode | None" = None

    @property
    def f(self) -> float:
        return self.g + self.h

    def path_vertices(self) -> tuple[int, ...]:
        out = []
        node: SearchNode | None = self
        while node is not None:
            out.append(node.vertex)
            node = node.parent
        return tuple(reversed(out))


@dataclass(frozen=True)
class SearchResult:
    path: Path
    expanded: int
    heuristic_evaluations: int


def equivalent_cost_heuristic(
    graph: WeightedGraph,
    expanded_from: int,
    candidate: int,
    target: int,
    config: SolverConfig | None = None,
    stripped: Iterable[int] = (),
) -> float:
    """Lower bound on the candidate-to-target cost once ``expanded_from`` is left.

    ``stripped`` names further vertices (earlier path vertices) whose edges
    are all removed as well. Returns ``math.inf`` when the target cannot be
    reached from the candidate in the reduced graph.
    """
    if candidate == target:
        return 0.0
    config = config or SolverConfig()
    p = expanded_from
    c_pc = graph.cost(p, candidate)
    gone = set(stripped) - {p}
    removed = [(p, k) for k, _ in graph.neighbors(p) if k != candidate]
    for v in gone:
        removed += [(v, k) for k, _ in graph.neighbors(v)]
    reduced = graph.without_edges(removed).with_terminals(p, target)
    if not is_connected_pair(reduced, candidate, target, blocked=(p,)):
        return math.inf
    field_ = solve_pinned(reduced, {p: 1.0, target: 0.0}, config)
    flow = (1.0 - field_[candidate]) / c_pc
    return max(1.0 / flow - c_pc, 0.0)


Heuristic = Callable[[SearchNode, int], float]


def astar(graph: WeightedGraph, heuristic: Heuristic) -> SearchResult:
    """Best-first search on ``g + h``.

    ``heuristic(node, v)`` estimates the cost from ``v`` to the target when
    ``v`` is reached from ``node``. Only admissibility is assumed, so a vertex
    that was already expanded is reopened whenever a strictly cheaper ``g``
    reaches it.
    """
    graph.require_valid()
    s, t = graph.source, graph.target
    evaluations = 0

    def h(node, v):
        nonlocal evaluations
        evaluations += 1
        return heuristic(node, v)

    root = SearchNode(s, 0.0, 0.0 if s == t else heuristic(SearchNode(s, 0.0, 0.0), s))
    best_g = {s: 0.0}
    tie = itertools.count()
    heap = [(root.f, next(tie), root)]
    expanded = 0
    while heap:
        _, _, node = heapq.heappop(heap)
        if node.g > best_g.get(node.vertex, math.inf):
            continue
        if node.vertex == t:
            return SearchResult(
                Path.from_vertices(graph, node.path_vertices()), expanded, evaluations
            )
        expanded += 1
        for u, c in graph.neighbors(node.vertex):
            g = node.g + c
            if g >= best_g.get(u, math.inf):
                continue
            est = h(node, u)
            if math.isinf(est):
                continue
            best_g[u] = g
            child = SearchNode(u, g, est, node)
            heapq.heappush(heap, (child.f, next(tie), child))
    raise SearchExhausted("open list exhausted before reaching the target")


def equivcost_search(
    graph: WeightedGraph,
    config: SolverConfig | None = None,
    *,
    variant: str = "expansion",
    strip: str = "parent",
) -> SearchResult:
    """A* guided by equivalent costs.

    ``variant="expansion"`` evaluates the bound on the graph reduced at the
    expanded vertex (``strip="parent"`` removes the other edges of the parent
    only, ``strip="path"`` additionally removes every edge of the earlier path
    vertices). ``variant="plain"`` uses the equivalent cost from the candidate
    to the target on the unmodified graph, which is cheaper to evaluate.
    """
    config = config or SolverConfig()
    t = graph.target
    memo: dict = {}

    if variant == "plain":

        def heuristic(node: SearchNode, v: int) -> float:
            if v == t:
                return 0.0
            if v not in memo:
                memo[v] = equivalent_cost(graph, v, t, config)
            return memo[v]

    elif variant == "expansion":
        if strip not in ("parent", "path"):
            raise ValueError(f"unknown strip mode {strip!r}")

        def heuristic(node: SearchNode, v: int) -> float:
            if v == t:
                return 0.0
            if v == node.vertex:  # the start vertex has no parent edge
                return 0.0
            ancestors = frozenset(node.path_vertices()[:-1]) if strip == "path" else frozenset()
            key = (node.vertex, v, ancestors)
            if key not in memo:
                memo[key] = equivalent_cost_heuristic(
                    graph, node.vertex, v, t, config, stripped=ancestors
                )
            return memo[key]

    else:
        raise ValueError(f"unknown heuristic variant {variant!r}")

    return astar(graph, heuristic)


def astar_equivcost(
    graph: WeightedGraph,
    config: SolverConfig | None = None,
    *,
    variant: str = "expansion",
    strip: str = "parent",
) -> Path:
    return equivcost_search(graph, config, variant=variant, strip=strip).path


def uniform_cost_search(graph: WeightedGraph) -> SearchResult:
    return astar(graph, lambda node, v: 0.0)
