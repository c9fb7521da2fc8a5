import math
import random

import pytest

from dhpf import SolverConfig, WeightedGraph, astar_equivcost, equivalent_cost_heuristic, equivcost_search
from dhpf.astar import uniform_cost_search

import oracles

# a diamond with a cross edge: 1 is the start, 4 the target
DIAMOND = WeightedGraph(
    4, ((1, 2, 2.0), (1, 3, 1.0), (2, 3, 3.0), (2, 4, 4.0), (3, 4, 2.0)), 1, 4
)


def test_expansion_estimate_is_series_remainder():
    h = equivalent_cost_heuristic(DIAMOND, 1, 2, 4)
    # with 1-3 gone, vertex 1 only feeds 2, so the estimate is the 2-4
    # resistance of what is left
    rest = DIAMOND.without_edges([(1, 3)])
    assert h == pytest.approx(oracles.effective_resistance(rest, 2, 4), rel=1e-8)
    assert 0 < h <= oracles.dijkstra(DIAMOND, 2, 4, removed_vertices=(1,))


def test_estimate_from_dense_flow():
    rest = DIAMOND.without_edges([(1, 3)])
    V = oracles.dense_potentials(rest, 1, 4)
    i12 = (V[1] - V[2]) / 2.0
    assert equivalent_cost_heuristic(DIAMOND, 1, 2, 4) == pytest.approx(1 / i12 - 2.0, rel=1e-8)


def test_candidate_is_target():
    assert equivalent_cost_heuristic(DIAMOND, 2, 4, 4) == 0.0


def test_chain_estimate_is_exact():
    a, b = 3.0, 5.0
    g = WeightedGraph(3, ((1, 2, a), (2, 3, b)), 1, 3)
    assert equivalent_cost_heuristic(g, 1, 2, 3) == pytest.approx(b, rel=1e-9)


def test_dead_end_candidate_is_pruned():
    g = WeightedGraph(4, ((1, 2, 1.0), (1, 3, 1.0), (3, 4, 1.0)), 1, 4)
    assert math.isinf(equivalent_cost_heuristic(g, 1, 2, 4))


@pytest.mark.parametrize("variant, strip", [("expansion", "parent"), ("expansion", "path"), ("plain", "parent")])
def test_seven(seven, variant, strip):
    result = equivcost_search(seven, variant=variant, strip=strip)
    assert result.path.vertices == (1, 6, 2, 3, 5)
    assert result.path.cost == 8
    assert result.expanded <= uniform_cost_search(seven).expanded


def test_two_vertices():
    g = WeightedGraph(2, ((1, 2, 7.0),), 1, 2)
    assert astar_equivcost(g).vertices == (1, 2)


def test_unknown_variant(seven):
    with pytest.raises(ValueError):
        equivcost_search(seven, variant="fancy")
    with pytest.raises(ValueError):
        equivcost_search(seven, strip="all")


@pytest.mark.parametrize("method, slack", [("direct", 1e-9), ("iterative", 1e-6)])
def test_admissible_on_corpus(corpus, method, slack):
    # 1/I - C magnifies solver error, so the relaxed solve gets more slack
    config = SolverConfig(method=method)
    rng = random.Random(5)
    checked = 0
    for g in corpus[:80]:
        t = g.target
        for p, c, _ in rng.sample(g.edge_list(), min(4, g.edge_count)):
            for a, b in ((p, c), (c, p)):
                if a == t:
                    continue
                h = equivalent_cost_heuristic(g, a, b, t, config)
                truth = oracles.dijkstra(g, b, t, removed_vertices=(a,)) if b != t else 0.0
                assert h >= 0
                assert h <= truth * (1 + slack)
                checked += 1
    assert checked > 300


@pytest.mark.parametrize("variant, strip", [("expansion", "parent"), ("expansion", "path"), ("plain", "parent")])
def test_optimal_on_corpus(corpus, variant, strip):
    for g in corpus[:100]:
        p = astar_equivcost(g, variant=variant, strip=strip)
        assert p.cost == pytest.approx(oracles.dijkstra(g, g.source, g.target), rel=1e-12)
