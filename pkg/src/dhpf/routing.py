"""Decentralized routing on a transient harmonic field.

Every router keeps its own potential and refreshes it from its live
neighbors; the target sits at 0 and a set of pinned routers sits at 1.
Between refreshes the router holding the packet hands it to the neighbor
receiving the largest positive flow. Routers can be knocked out at random on
every hop to exercise robustness.

Which routers are pinned at 1 is set by ``SimConfig.pinning``:

``"origin"``
    the router that injected the packet, for the whole run. Once the field
    has settled, the packet follows the same route as a positive-flow trace
    on the centralized field.
``"holder"``
    only the current holder; a router that hands the packet on is released
    and relaxes again. On some graphs the packet then bounces between two
    routers forever, because the released router ends up downhill of the
    new holder.
``"trail"``
    every router that has held the packet. Delivery is guaranteed within N
    hops when no router fails, but routes can differ from the centralized
    trace.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

from .graph import WeightedGraph, is_connected_pair
from .solver import FLOW_EPSILON

__all__ = [
    "SimConfig",
    "RouterNetworkState",
    "SimulationTrace",
    "TrialStats",
    "run_decentralized",
    "run_trials",
    "format_trace",
    "format_histogram",
]

FAILURE_MODES = ("none", "random")
FAILURE_DURATIONS = ("transient", "permanent")
PINNING_MODES = ("origin", "holder", "trail")


@dataclass(frozen=True)
class SimConfig:
    sweeps_per_hop: int = 50
    failure_mode: str = "none"
    failure_duration: str = "transient"
    rng_seed: int = 0
    max_hops: int = 200
    pinning: str = "origin"
    flow_epsilon: float = FLOW_EPSILON

    def __post_init__(self):
        if self.sweeps_per_hop < 1:
            raise ValueError("sweeps_per_hop must be at least 1")
        if self.max_hops < 1:
            raise ValueError("max_hops must be at least 1")
        if self.failure_mode not in FAILURE_MODES:
            raise ValueError(f"unknown failure mode {self.failure_mode!r}")
        if self.failure_duration not in FAILURE_DURATIONS:
            raise ValueError(f"unknown failure duration {self.failure_duration!r}")
        if self.pinning not in PINNING_MODES:
            raise ValueError(f"unknown pinning mode {self.pinning!r}")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be nonnegative")


@dataclass
class RouterNetworkState:
    """Mutable per-run state; pinned routers hold potential 1, the target 0."""

    potentials: list[float]  # index 0 unused
    holder: int
    failed: set[int] = field(default_factory=set)
    pinned: set[int] = field(default_factory=set)
    hop_count: int = 0


@dataclass(frozen=True)
class SimulationTrace:
    hops: tuple[tuple[int, int, int | None], ...]  # (hop, holder, failed vertex)
    delivered: bool
    total_hops: int
    path_cost: float
    seed: int = 0

    @property
    def route(self) -> list[int]:
        """Holders in visiting order with waiting hops collapsed."""
        out: list[int] = []
        for _, v, _ in self.hops:
            if not out or out[-1] != v:
                out.append(v)
        return out


@dataclass(frozen=True)
class TrialStats:
    traces: tuple[SimulationTrace, ...]

    @property
    def hop_counts(self) -> list[int]:
        return [tr.total_hops for tr in self.traces]

    @property
    def delivered(self) -> list[bool]:
        return [tr.delivered for tr in self.traces]

    @property
    def delivery_rate(self) -> float:
        return sum(self.delivered) / len(self.traces)

    def histogram(self) -> dict[int, int]:
        """Delivered hop counts in unit-width bins."""
        counts = Counter(tr.total_hops for tr in self.traces if tr.delivered)
        return dict(sorted(counts.items()))


def _sweep(graph: WeightedGraph, state: RouterNetworkState, target: int) -> None:
    V = state.potentials
    skip = state.failed | state.pinned | {target}
    for v in graph.vertices:
        if v in skip:
            continue
        num = den = 0.0
        for k, c in graph.neighbors(v):
            if k in state.failed:
                continue
            num += V[k] / c
            den += 1.0 / c
        if den > 0.0:
            V[v] = num / den


def _next_hop(graph: WeightedGraph, state: RouterNetworkState, eps: float) -> int | None:
    V = state.potentials
    h = state.holder
    best, best_flow = None, eps
    for k, c in graph.neighbors(h):
        if k in state.failed:
            continue
        x = (V[h] - V[k]) / c
        if x > best_flow:
            best, best_flow = k, x
    return best


def run_decentralized(graph: WeightedGraph, config: SimConfig | None = None) -> SimulationTrace:
    """Route one packet from the start vertex; non-delivery is a trace outcome."""
    config = config or SimConfig()
    graph.require_valid()
    s, t = graph.source, graph.target
    rng = np.random.default_rng(config.rng_seed)

    V = [0.0] * (graph.vertex_count + 1)
    free = [v for v in graph.vertices if v not in (s, t)]
    draws = rng.uniform(0.0, 1.0, size=len(free))
    for v, x in zip(free, draws):
        V[v] = float(x) if x > 0.0 else 0.5
    V[s], V[t] = 1.0, 0.0
    state = RouterNetworkState(V, s, pinned={s})

    hops: list[tuple[int, int, int | None]] = [(0, s, None)]
    cost = 0.0
    permanent = config.failure_duration == "permanent"
    while state.holder != t and state.hop_count < config.max_hops:
        failed_now = None
        if not permanent:
            state.failed.clear()
        if config.failure_mode == "random":
            candidates = [
                v for v in graph.vertices
                if v not in (t, state.holder) and v not in state.failed
            ]
            if candidates:
                failed_now = candidates[int(rng.integers(len(candidates)))]
                state.failed.add(failed_now)
        if permanent and not is_connected_pair(graph, state.holder, t, blocked=state.failed):
            state.hop_count += 1
            hops.append((state.hop_count, state.holder, failed_now))
            return SimulationTrace(tuple(hops), False, state.hop_count, cost, config.rng_seed)

        for _ in range(config.sweeps_per_hop):
            _sweep(graph, state, t)
        nxt = _next_hop(graph, state, config.flow_epsilon)
        if nxt is not None:
            cost += graph.cost(state.holder, nxt)
            state.holder = nxt
            if nxt != t and config.pinning != "origin":
                if config.pinning == "holder":
                    state.pinned.clear()
                state.pinned.add(nxt)
                V[nxt] = 1.0
        state.hop_count += 1
        hops.append((state.hop_count, state.holder, failed_now))

    delivered = state.holder == t
    return SimulationTrace(tuple(hops), delivered, state.hop_count, cost, config.rng_seed)


def run_trials(graph: WeightedGraph, config: SimConfig, trial_count: int) -> TrialStats:
    """Independent runs seeded ``rng_seed + trial`` for ``trial`` in ``0..trial_count-1``."""
    if trial_count < 1:
        raise ValueError("trial_count must be at least 1")
    traces = []
    for k in range(trial_count):
        traces.append(run_decentralized(graph, replace(config, rng_seed=config.rng_seed + k)))
    return TrialStats(tuple(traces))


def format_trace(trace: SimulationTrace) -> str:
    lines = [
        f"{hop}\t{holder}\t{'-' if failed is None else failed}"
        for hop, holder, failed in trace.hops
    ]
    return "\n".join(lines) + "\n"


def format_histogram(stats: TrialStats) -> str:
    return "".join(f"{b} {n}\n" for b, n in stats.histogram().items())
