"""Weighted non-directed graphs with designated start and target vertices.

Vertex ids are 1-based at every public boundary. Graph values are immutable;
helpers that drop edges or move the terminals return new graphs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import networkx as nx

__all__ = [
    "GraphFormatError",
    "MalformedLineError",
    "DuplicateEdgeError",
    "NonpositiveCostError",
    "MissingDirectiveError",
    "UnknownVertexError",
    "InvalidGraphError",
    "WeightedGraph",
    "Path",
    "ValidationReport",
    "parse_graph",
    "read_graph",
    "serialize_graph",
    "validate",
    "neighbors",
    "reachable",
    "is_connected_pair",
]


class GraphFormatError(ValueError):
    """Raised by :func:`parse_graph`; ``line`` is the 1-based source line or None."""

    kind = "format error"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.detail = message
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{self.kind}: {message}")


class MalformedLineError(GraphFormatError):
    kind = "malformed line"


class DuplicateEdgeError(GraphFormatError):
    kind = "duplicate edge"


class NonpositiveCostError(GraphFormatError):
    kind = "nonpositive cost"


class MissingDirectiveError(GraphFormatError):
    kind = "missing directive"


class UnknownVertexError(GraphFormatError):
    kind = "unknown vertex id"


class InvalidGraphError(ValueError):
    """A graph failed validation; ``violations`` lists every problem found."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid graph: " + "; ".join(self.violations))


@dataclass(frozen=True)
class WeightedGraph:
    """Non-directed graph on vertices ``1..vertex_count``.

    ``edges`` holds ``(i, j, cost)`` triples as supplied. The constructor does
    not enforce the structural invariants so that :func:`validate` can report
    them; every algorithm in the package calls :meth:`require_valid` first.
    """

    vertex_count: int
    edges: tuple[tuple[int, int, float], ...]
    source: int
    target: int

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple((int(i), int(j), float(c)) for i, j, c in self.edges)
        )

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Iterable[tuple[int, int, float]],
        source: int,
        target: int,
    ) -> "WeightedGraph":
        return cls(vertex_count, tuple(edges), source, target)

    @cached_property
    def _adjacency(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        adj: list[dict[int, float]] = [{} for _ in range(self.vertex_count + 1)]
        for i, j, c in self.edges:
            if not (self.has_vertex(i) and self.has_vertex(j)) or i == j:
                continue
            # first occurrence wins; duplicates are reported by validate()
            adj[i].setdefault(j, c)
            adj[j].setdefault(i, c)
        return tuple(tuple(sorted(d.items())) for d in adj)

    @cached_property
    def _cost_map(self) -> dict[tuple[int, int], float]:
        out = {}
        for v, row in enumerate(self._adjacency):
            for u, c in row:
                out[(v, u)] = c
        return out

    @property
    def vertices(self) -> range:
        return range(1, self.vertex_count + 1)

    def has_vertex(self, v: int) -> bool:
        return 1 <= v <= self.vertex_count

    def neighbors(self, v: int) -> tuple[tuple[int, float], ...]:
        if not self.has_vertex(v):
            raise KeyError(f"unknown vertex id {v}")
        return self._adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def cost(self, i: int, j: int) -> float:
        try:
            return self._cost_map[(i, j)]
        except KeyError:
            raise KeyError(f"no edge between {i} and {j}") from None

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self._cost_map

    def edge_list(self) -> list[tuple[int, int, float]]:
        """Distinct edges as ``(i, j, cost)`` with ``i < j``, sorted."""
        return sorted((i, j, c) for (i, j), c in self._cost_map.items() if i < j)

    @property
    def edge_count(self) -> int:
        return len(self._cost_map) // 2

    def with_terminals(self, source: int, target: int) -> "WeightedGraph":
        return WeightedGraph(self.vertex_count, self.edges, source, target)

    def without_edges(self, removed: Iterable[tuple[int, int]]) -> "WeightedGraph":
        drop = {frozenset(e) for e in removed}
        kept = tuple(e for e in self.edges if frozenset(e[:2]) not in drop)
        return WeightedGraph(self.vertex_count, kept, self.source, self.target)

    def scaled(self, factor: float) -> "WeightedGraph":
        return WeightedGraph(
            self.vertex_count,
            tuple((i, j, c * factor) for i, j, c in self.edges),
            self.source,
            self.target,
        )

    def require_valid(self) -> "WeightedGraph":
        report = validate(self)
        if not report.ok:
            raise InvalidGraphError(report.violations)
        return self


@dataclass(frozen=True)
class Path:
    vertices: tuple[int, ...]
    cost: float

    @classmethod
    def from_vertices(cls, graph: WeightedGraph, vertices: Sequence[int]) -> "Path":
        vs = tuple(vertices)
        if not vs:
            raise ValueError("empty path")
        if len(set(vs)) != len(vs):
            raise ValueError(f"path repeats a vertex: {vs}")
        total = 0.0
        for a, b in zip(vs, vs[1:]):
            if not graph.has_edge(a, b):
                raise ValueError(f"{a} and {b} are not adjacent")
            total += graph.cost(a, b)
        return cls(vs, total)

    @property
    def hops(self) -> int:
        return len(self.vertices) - 1

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def __str__(self) -> str:
        return " -> ".join(str(v) for v in self.vertices)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations


def reachable(
    graph: WeightedGraph, start: int, blocked: Iterable[int] = ()
) -> set[int]:
    """Vertices reachable from ``start`` by breadth-first search, avoiding ``blocked``."""
    stop = set(blocked)
    if start in stop:
        return set()
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u, _ in graph.neighbors(v):
            if u not in seen and u not in stop:
                seen.add(u)
                queue.append(u)
    return seen


def is_connected_pair(
    graph: WeightedGraph, a: int, b: int, blocked: Iterable[int] = ()
) -> bool:
    return b in reachable(graph, a, blocked)


def route_core(graph: WeightedGraph, a: int, b: int) -> set[int]:
    """Vertices lying on at least one simple path from ``a`` to ``b``.

    These are the vertices of the biconnected block that holds the edge
    ``a``-``b`` once that edge is added to the graph. Everything else sits in
    a dead-end region and carries no flow between ``a`` and ``b``.
    """
    if b not in reachable(graph, a):
        return set()
    g = nx.Graph()
    g.add_edges_from((i, j) for i, j, _ in graph.edges)
    g.add_edge(a, b)
    for block in nx.biconnected_components(g):
        if a in block and b in block:
            return set(block)
    raise AssertionError("unreachable: the added edge lies in some block")


def dead_end_anchors(graph: WeightedGraph, core: set[int]) -> dict[int, int]:
    """Map each vertex outside ``core`` but connected to it onto the core vertex it hangs from."""
    anchor: dict[int, int] = {}
    for c in sorted(core):
        queue = deque([c])
        while queue:
            v = queue.popleft()
            for u, _ in graph.neighbors(v):
                if u not in core and u not in anchor:
                    anchor[u] = c
                    queue.append(u)
    return anchor


def validate(graph: WeightedGraph) -> ValidationReport:
    violations: list[str] = []
    n = graph.vertex_count
    if n < 1:
        violations.append(f"vertex count must be positive, got {n}")
    seen: dict[frozenset[int], float] = {}
    for i, j, c in graph.edges:
        if not (graph.has_vertex(i) and graph.has_vertex(j)):
            violations.append(f"unknown vertex id in edge {i}-{j}")
            continue
        if i == j:
            violations.append(f"self-loop at vertex {i}")
            continue
        if not math.isfinite(c):
            violations.append(f"non-finite cost on edge {i}-{j}")
        elif c <= 0:
            violations.append(f"nonpositive cost on edge {i}-{j}")
        key = frozenset((i, j))
        if key in seen:
            violations.append(f"duplicate edge {min(i, j)}-{max(i, j)}")
        seen[key] = c
    s, t = graph.source, graph.target
    terminals_ok = True
    for name, v in (("source", s), ("target", t)):
        if not graph.has_vertex(v):
            violations.append(f"{name} {v} is not a valid vertex id")
            terminals_ok = False
    if terminals_ok and s == t:
        violations.append("source and target coincide")
        terminals_ok = False
    if terminals_ok and not is_connected_pair(graph, s, t):
        violations.append("S and T disconnected")
    return ValidationReport(tuple(violations))


def neighbors(graph: WeightedGraph, v: int) -> list[tuple[int, float]]:
    """Adjacent ``(vertex, cost)`` pairs in ascending vertex id."""
    return list(graph.neighbors(v))


def _parse_int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise MalformedLineError(f"expected an integer, got {tok!r}", lineno) from None


def parse_graph(text: str) -> WeightedGraph:
    """Parse the line-oriented graph format and return a validated graph.

    ``vertices N`` must be the first directive; ``edge i j cost`` lines follow
    in any order together with exactly one ``source S`` and ``target T``.
    """
    n: int | None = None
    source = target = None
    edges: list[tuple[int, int, float]] = []
    seen: set[frozenset[int]] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        head, args = tokens[0], tokens[1:]
        if n is None and head != "vertices":
            raise MalformedLineError("first directive must be 'vertices N'", lineno)

        if head == "vertices":
            if n is not None:
                raise MalformedLineError("'vertices' given more than once", lineno)
            if len(args) != 1:
                raise MalformedLineError("expected 'vertices N'", lineno)
            n = _parse_int(args[0], lineno)
            if n < 1:
                raise MalformedLineError("vertex count must be positive", lineno)
        elif head == "edge":
            if len(args) != 3:
                raise MalformedLineError("expected 'edge i j cost'", lineno)
            i, j = _parse_int(args[0], lineno), _parse_int(args[1], lineno)
            try:
                c = float(args[2])
            except ValueError:
                raise MalformedLineError(f"bad cost {args[2]!r}", lineno) from None
            if not math.isfinite(c):
                raise MalformedLineError(f"cost must be finite, got {args[2]!r}", lineno)
            for v in (i, j):
                if not 1 <= v <= n:
                    raise UnknownVertexError(f"vertex {v} outside 1..{n}", lineno)
            if i == j:
                raise MalformedLineError(f"self-loop at vertex {i}", lineno)
            if c <= 0:
                raise NonpositiveCostError(f"edge {i}-{j} has cost {args[2]}", lineno)
            key = frozenset((i, j))
            if key in seen:
                raise DuplicateEdgeError(f"edge {i}-{j} listed twice", lineno)
            seen.add(key)
            edges.append((i, j, c))
        elif head in ("source", "target"):
            if len(args) != 1:
                raise MalformedLineError(f"expected '{head} V'", lineno)
            if (source if head == "source" else target) is not None:
                raise MalformedLineError(f"'{head}' given more than once", lineno)
            v = _parse_int(args[0], lineno)
            if not 1 <= v <= n:
                raise UnknownVertexError(f"vertex {v} outside 1..{n}", lineno)
            if head == "source":
                source = v
            else:
                target = v
        else:
            raise MalformedLineError(f"unknown directive {head!r}", lineno)

    if n is None:
        raise MissingDirectiveError("no 'vertices' line")
    if source is None:
        raise MissingDirectiveError("no 'source' line")
    if target is None:
        raise MissingDirectiveError("no 'target' line")

    graph = WeightedGraph(n, tuple(edges), source, target)
    graph.require_valid()
    return graph


def read_graph(path) -> WeightedGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def serialize_graph(graph: WeightedGraph) -> str:
    lines = [f"vertices {graph.vertex_count}"]
    lines += [f"edge {i} {j} {c!r}" for i, j, c in graph.edge_list()]
    lines += [f"source {graph.source}", f"target {graph.target}"]
    return "\n".join(lines) + "\n"
