"""Independent Cascade baseline sharing the engine's trace format."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SimulationConfig
from .engine import CascadeTrace, TraceEvent
from .graph import AttitudeState, DirectedGraph


@dataclass(frozen=True)
class ICConfig:
    """``p=None`` uses each edge's own weight as its activation probability."""

    p: float | None = None
    rounds: int = 10
    rng_seed: int = 0

    def __post_init__(self):
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError("activation probability must lie in [0, 1]")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")


def edge_draws(graph: DirectedGraph, rng_seed: int, topic: int = 0) -> np.ndarray:
    # One uniform per edge, independent of p, so runs at different p share randomness.
    return np.random.default_rng([rng_seed, topic]).random(graph.edge_count)


def run_ic(graph: DirectedGraph, seeds, config: ICConfig, topic: int = 0, seed_attitudes=None):
    """Classic IC cascade from ``seeds``.

    Each node activated in round ``r - 1`` (seeds in round 0) makes one attempt
    on every inactive out-neighbor in round ``r``; the attempt on edge ``e``
    succeeds when ``draw[e] < p_e``. An activated node copies the attitude of
    the sender that activated it; seed attitudes default to POSITIVE.

    Returns ``(activated, trace)`` where ``activated[r]`` lists the nodes that
    became active in round ``r`` (``activated[0]`` are the seeds).
    """
    n = graph.node_count
    seeds = sorted({int(s) for s in seeds})
    for s in seeds:
        if not 0 <= s < n:
            raise IndexError(f"seed node {s} out of range for graph with {n} nodes")
    attitude = np.full(n, -1.0)
    for s in seeds:
        attitude[s] = 0.0 if seed_attitudes is None else float(seed_attitudes[s])
    if np.any(attitude[seeds] == -1.0):
        raise ValueError("seed attitudes must be known (not UNKNOWN)")

    probs = graph.weights if config.p is None else np.full(graph.edge_count, config.p)
    live = edge_draws(graph, config.rng_seed, topic) < probs
    indptr, targets = graph.indptr, graph.targets

    activated = [seeds]
    events = []
    frontier = seeds
    for r in range(1, config.rounds + 1):
        if not frontier:
            break
        newly = []
        for v in frontier:
            for e in range(indptr[v], indptr[v + 1]):
                q = int(targets[e])
                if attitude[q] != -1.0 or not live[e]:
                    continue
                attitude[q] = attitude[v]
                newly.append(q)
                events.append(TraceEvent(r, q, topic, -1.0, float(attitude[v]), int(v),
                                         float(probs[e]), float("nan")))
        if not newly:
            break
        newly.sort()
        activated.append(newly)
        frontier = newly
    return activated, CascadeTrace.from_events(events)


def run_ic_topics(graph: DirectedGraph, attitudes: AttitudeState, config: SimulationConfig):
    """IC over the topics selected by ``config``, seeded by each topic's aware nodes.

    Returns ``(final attitudes, trace)``.
    """
    n, z = attitudes.values.shape
    topics = range(z) if config.topic is None else [config.topic]
    ic = ICConfig(p=config.ic_probability, rounds=config.rounds, rng_seed=config.rng_seed)
    values = attitudes.values.copy()
    parts = []
    for t in topics:
        if not 0 <= t < z:
            raise ValueError(f"topic {t} out of range for {z} topics")
        seeds = np.flatnonzero(values[:, t] != -1.0)
        _, trace = run_ic(graph, seeds, ic, topic=t, seed_attitudes=values[:, t])
        values[trace.node, t] = trace.new
        parts.append(trace)
    return AttitudeState(values), CascadeTrace.concat(parts)
