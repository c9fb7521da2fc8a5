import math

import pytest

from dhpf import (
    SolverConfig,
    WeightedGraph,
    astar_equivcost,
    compute_flow_indices,
    compute_flows,
    mstar_direct,
    mstar_indirect,
    solve_potentials,
)
from dhpf.mstar import CascadeEvent, JunctionEvent, TraceEvent

import oracles


def indices(g):
    return compute_flow_indices(g, compute_flows(g, solve_potentials(g)))


def test_seven_indices(seven):
    t = indices(seven)
    assert (t.pfi[7], t.nfi[7]) == (2, 2)
    assert (t.pfi[1], t.nfi[1]) == (2, 0)
    assert (t.pfi[5], t.nfi[5]) == (0, 2)


def test_indices_count_every_flowing_edge(corpus):
    for g in corpus[:40]:
        t = indices(g)
        assert t.nfi[g.source] == 0 and t.pfi[g.target] == 0
        for v in g.vertices:
            assert t.pfi[v] + t.nfi[v] == g.degree(v)


@pytest.mark.parametrize("solver", [mstar_direct, mstar_indirect])
def test_seven_optimal(seven, solver):
    p = solver(seven)
    assert p.vertices == (1, 6, 2, 3, 5)
    assert p.cost == 8


def test_seven_strict_mode(seven):
    assert mstar_indirect(seven, strict=True).vertices == (1, 6, 2, 3, 5)


@pytest.mark.parametrize("solver", [mstar_direct, mstar_indirect])
def test_two_vertices(solver):
    g = WeightedGraph(2, ((1, 2, 2.5),), 1, 2)
    p = solver(g)
    assert p.vertices == (1, 2) and p.cost == 2.5


def test_seven_event_log(seven):
    log = []
    mstar_indirect(seven, log=log)
    junctions = [e for e in log if isinstance(e, JunctionEvent)]
    assert [j.junction for j in junctions] == [7, 6, 4, 1]

    first = junctions[0]
    assert dict(first.routes) == {(7, 3, 5): 7.0, (7, 5): 5.0}
    assert first.kept == (7, 5)
    assert first.deleted == ((7, 3),)

    assert [j.deleted for j in junctions[1:]] == [((6, 7),), ((4, 7),), ((1, 4),)]
    cascades = [e.deleted for e in log if isinstance(e, CascadeEvent)]
    assert cascades == [(7, 5), (4, 3)]
    # edge 7-5 goes once 7 has lost both inflows
    at = log.index(next(e for e in log if isinstance(e, CascadeEvent)))
    assert log[at - 1] == junctions[2]
    # the strongest-inflow trace 5 <- 3 <- 2 <- 6 stops at junction 6, whose
    # route through 7 leads to the deeper junction handled first
    assert log[0] == TraceEvent((5, 3, 2, 6), 6)
    assert isinstance(log[-1], TraceEvent) and log[-1].junction is None


def test_realizations_agree_on_corpus(corpus):
    for g in corpus:
        d, i = mstar_direct(g), mstar_indirect(g)
        assert d.cost == pytest.approx(i.cost, rel=1e-12)
        assert len(d) <= g.vertex_count


def test_strict_matches_plain(corpus):
    for g in corpus[:40]:
        assert mstar_indirect(g, strict=True).cost == pytest.approx(mstar_indirect(g).cost)


def test_small_graphs_against_enumeration(corpus):
    checked = 0
    for g in corpus:
        if g.vertex_count > 10:
            continue
        best = oracles.brute_force_shortest(g, g.source, g.target)
        assert mstar_direct(g).cost == pytest.approx(best, rel=1e-12)
        checked += 1
    assert checked > 50


def shortcut_counterexample(copies=20):
    """S=1, a=2, b=3, T=4, plus ``copies`` parallel two-hop S-b detours.

    The detours raise b above a, so the flow on a-b runs from b to a while the
    unique cheapest route S-a-b-T crosses it from a to b.
    """
    edges = [(1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (2, 4, 2.01)]
    for k in range(copies):
        x = 5 + k
        edges += [(1, x, 1.1), (x, 3, 1.0)]
    return WeightedGraph(4 + copies, tuple(edges), 1, 4)


def test_positive_flow_routes_can_miss_the_optimum():
    g = shortcut_counterexample()
    V = solve_potentials(g)
    assert V[2] < V[3]
    assert oracles.dijkstra(g, 1, 4) == 3.0
    assert astar_equivcost(g).vertices == (1, 2, 3, 4)
    for solver in (mstar_direct, mstar_indirect):
        p = solver(g)
        assert p.cost == pytest.approx(3.01)
        assert p.cost > 3.0


def test_unfiltered_graphs_with_dead_ends():
    import random

    rng = random.Random(17)
    with_dead_ends = 0
    for _ in range(150):
        g = oracles.random_graph(rng)
        with_dead_ends += not oracles.every_vertex_on_a_route(g)
        best = oracles.dijkstra(g, g.source, g.target)
        assert mstar_direct(g).cost == pytest.approx(best, rel=1e-12)
        assert mstar_indirect(g).cost == pytest.approx(best, rel=1e-12)
    assert with_dead_ends > 20


def test_uphill_optimum_from_random_sample():
    # drawn from the same G(n, p) family as the corpus; the cheapest route
    # steps from 6 up to 1, so no positive-flow route contains it
    from conftest import DATA
    from dhpf import read_graph

    g = read_graph(DATA / "uphill_optimum.graph")
    V = solve_potentials(g)
    assert V[6] < V[1]
    assert oracles.dijkstra(g, 10, 8) == 24.0
    assert astar_equivcost(g).cost == 24.0
    assert mstar_direct(g).cost == mstar_indirect(g).cost == 26.0
