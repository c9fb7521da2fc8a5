import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dhpf import Path, WeightedGraph, neighbors, parse_graph, serialize_graph, validate
from dhpf.graph import (
    DuplicateEdgeError,
    GraphFormatError,
    InvalidGraphError,
    MalformedLineError,
    MissingDirectiveError,
    NonpositiveCostError,
    UnknownVertexError,
)


def test_seven_parses(seven):
    assert seven.vertex_count == 7
    assert seven.edge_count == 10
    assert (seven.source, seven.target) == (1, 5)
    assert seven.cost(1, 6) == 1.0
    assert seven.cost(5, 7) == 5.0
    assert seven.cost(7, 5) == 5.0


def test_two_vertex_file():
    g = parse_graph("vertices 2\nedge 1 2 3.0\nsource 1\ntarget 2\n")
    assert g.edge_list() == [(1, 2, 3.0)]


def test_comments_and_blank_lines():
    text = "# header\n\nvertices 2  # two\nedge 1 2 1.5\nsource 1\n  target 2\n"
    assert parse_graph(text).cost(1, 2) == 1.5


@pytest.mark.parametrize(
    "text, error, line",
    [
        ("vertices 2\nedge 1 2 0\nsource 1\ntarget 2\n", NonpositiveCostError, 2),
        ("vertices 2\nedge 1 2 -1\nsource 1\ntarget 2\n", NonpositiveCostError, 2),
        ("vertices 2\nedge 1 2\nsource 1\ntarget 2\n", MalformedLineError, 2),
        ("vertices 2\nedge 1 2 abc\nsource 1\ntarget 2\n", MalformedLineError, 2),
        ("vertices 2\nedge 1 2 1\nedge 2 1 4\nsource 1\ntarget 2\n", DuplicateEdgeError, 3),
        ("vertices 2\nedge 1 3 1\nsource 1\ntarget 2\n", UnknownVertexError, 2),
        ("vertices 2\nedge 1 2 1\nsource 9\ntarget 2\n", UnknownVertexError, 3),
        ("vertices 2\nedge 1 2 1\ntarget 2\n", MissingDirectiveError, None),
        ("edge 1 2 1\nvertices 2\nsource 1\ntarget 2\n", MalformedLineError, 1),
        ("vertices 2\nnode 1\nsource 1\ntarget 2\n", MalformedLineError, 2),
        ("vertices 2\nedge 1 2 1\nsource 1\nsource 2\ntarget 2\n", MalformedLineError, 4),
    ],
)
def test_parse_errors_carry_kind_and_line(text, error, line):
    with pytest.raises(error) as info:
        parse_graph(text)
    assert isinstance(info.value, GraphFormatError)
    assert info.value.line == line
    if line is not None:
        assert f"line {line}" in str(info.value)


def test_error_kinds_are_distinct():
    kinds = {
        NonpositiveCostError.kind,
        MalformedLineError.kind,
        DuplicateEdgeError.kind,
        UnknownVertexError.kind,
        MissingDirectiveError.kind,
    }
    assert len(kinds) == 5
    assert "nonpositive cost" in kinds


def test_disconnected_terminals_rejected_at_parse():
    text = "vertices 4\nedge 1 2 1\nedge 3 4 1\nsource 1\ntarget 4\n"
    with pytest.raises(InvalidGraphError) as info:
        parse_graph(text)
    assert "S and T disconnected" in info.value.violations


def test_validate_reports_every_violation():
    g = WeightedGraph(4, ((1, 2, 1.0), (1, 2, 3.0), (3, 3, 1.0), (3, 4, 0.0)), 1, 4)
    report = validate(g)
    assert not report.ok
    text = " | ".join(report.violations)
    assert "duplicate edge" in text
    assert "self-loop" in text
    assert "nonpositive" in text
    assert "S and T disconnected" in text


def test_validate_seven_ok(seven):
    assert validate(seven).ok


def test_validate_same_terminals():
    g = WeightedGraph(2, ((1, 2, 1.0),), 1, 1)
    assert any("coincide" in v for v in validate(g).violations)


def test_neighbors_examples(seven):
    assert neighbors(seven, 1) == [(4, 3.0), (6, 1.0)]
    assert neighbors(seven, 5) == [(3, 2.0), (7, 5.0)]


def test_isolated_vertex_has_no_neighbors():
    g = WeightedGraph(3, ((1, 2, 1.0),), 1, 2)
    assert neighbors(g, 3) == []


def test_unknown_vertex_neighbors():
    g = WeightedGraph(2, ((1, 2, 1.0),), 1, 2)
    with pytest.raises(KeyError):
        neighbors(g, 7)


def test_round_trip_seven(seven):
    again = parse_graph(serialize_graph(seven))
    assert again.edge_list() == seven.edge_list()
    assert (again.source, again.target) == (seven.source, seven.target)
    assert serialize_graph(again) == serialize_graph(seven)


def test_path_from_vertices(seven):
    p = Path.from_vertices(seven, (1, 6, 2, 3, 5))
    assert p.cost == 8.0
    assert p.hops == 4
    assert str(p) == "1 -> 6 -> 2 -> 3 -> 5"
    with pytest.raises(ValueError):
        Path.from_vertices(seven, (1, 6, 1))
    with pytest.raises(ValueError):
        Path.from_vertices(seven, (1, 5))


@st.composite
def graphs(draw):
    n = draw(st.integers(2, 9))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=1))
    costs = draw(
        st.lists(
            st.floats(1e-3, 1e3, allow_nan=False, allow_infinity=False),
            min_size=len(chosen),
            max_size=len(chosen),
        )
    )
    edges = tuple((i, j, c) for (i, j), c in zip(chosen, costs))
    return WeightedGraph(n, edges, chosen[0][0], chosen[0][1])


@settings(max_examples=100, deadline=None)
@given(graphs())
def test_round_trip_property(g):
    again = parse_graph(serialize_graph(g))
    assert again.edge_list() == g.edge_list()
    assert (again.source, again.target, again.vertex_count) == (g.source, g.target, g.vertex_count)


@settings(max_examples=100, deadline=None)
@given(graphs())
def test_neighbor_symmetry(g):
    for i in g.vertices:
        for j, c in neighbors(g, i):
            assert (i, c) in neighbors(g, j)
        assert [k for k, _ in neighbors(g, i)] == sorted(k for k, _ in neighbors(g, i))


def test_route_core_matches_enumeration():
    import random

    import oracles
    from dhpf.graph import dead_end_anchors, route_core

    rng = random.Random(3)
    for _ in range(150):
        g = oracles.random_graph(rng, n_range=(3, 9))
        on_route = set()
        for path, _ in oracles.simple_paths(g, g.source, g.target):
            on_route |= set(path)
        core = route_core(g, g.source, g.target)
        assert core == on_route
        anchors = dead_end_anchors(g, core)
        assert set(anchors) == set(g.vertices) - core
        assert set(anchors.values()) <= core
