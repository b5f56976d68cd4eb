import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_instance
from uape import DirectedGraph, ICConfig, SimulationConfig, run_ic, run_ic_topics


def _reachable(graph, seeds, hops=None):
    g = nx.DiGraph()
    g.add_nodes_from(range(graph.node_count))
    g.add_edges_from(zip(graph.sources.tolist(), graph.targets.tolist()))
    out = set(seeds)
    for s in seeds:
        out |= set(nx.single_source_shortest_path_length(g, s, cutoff=hops))
    return out


def _activated(result):
    return set().union(*map(set, result[0]))


@pytest.mark.parametrize("seed", range(5))
def test_certain_transmission_reaches_everything_reachable(seed):
    graph, _ = random_instance(np.random.default_rng(seed), n_max=60)
    seeds = list(range(min(3, graph.node_count)))
    result = run_ic(graph, seeds, ICConfig(p=1.0, rounds=graph.node_count + 1))
    assert _activated(result) == _reachable(graph, seeds)


def test_round_limit_is_hop_limit():
    graph, _ = random_instance(np.random.default_rng(4), n_max=60)
    result = run_ic(graph, [0], ICConfig(p=1.0, rounds=2))
    assert _activated(result) == _reachable(graph, [0], hops=2)


def test_zero_probability_keeps_seeds():
    graph, _ = random_instance(np.random.default_rng(1), n_max=60)
    activated, trace = run_ic(graph, [0], ICConfig(p=0.0, rounds=5))
    assert activated == [[0]] and len(trace) == 0


def test_path_single_round():
    graph = DirectedGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])
    activated, trace = run_ic(graph, [0], ICConfig(p=1.0, rounds=1))
    assert activated == [[0], [1]]
    ev = trace.events[0]
    assert (ev.round, ev.node, ev.old, ev.new, ev.sender) == (1, 1, -1.0, 0.0, 0)


def test_sender_attitude_is_copied():
    graph = DirectedGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])
    attitudes = np.array([1.0, -1.0, -1.0])
    activated, trace = run_ic(graph, [0], ICConfig(rounds=3), seed_attitudes=attitudes)
    assert trace.new.tolist() == [1.0, 1.0]


def test_edge_weights_used_when_p_unset():
    graph = DirectedGraph.from_edges(3, [(0, 1, 1.0), (0, 2, 0.0)])
    activated, _ = run_ic(graph, [0], ICConfig(rounds=3))
    assert activated == [[0], [1]]


def test_seed_out_of_range():
    graph = DirectedGraph.from_edges(2, [(0, 1, 1.0)])
    with pytest.raises(IndexError):
        run_ic(graph, [2], ICConfig())


@settings(max_examples=200)
@given(st.integers(0, 2**31), st.floats(0, 1))
def test_each_edge_attempted_once(seed, p):
    graph, _ = random_instance(np.random.default_rng(seed), n_max=30)
    _, trace = run_ic(graph, [0], ICConfig(p=p, rounds=10, rng_seed=seed))
    pairs = list(zip(trace.sender.tolist(), trace.node.tolist()))
    assert len(pairs) == len(set(pairs))
    assert len(set(trace.node.tolist())) == len(trace)


@settings(max_examples=200)
@given(st.integers(0, 2**31), st.floats(0, 1), st.floats(0, 1))
def test_monotone_in_p_under_shared_draws(seed, p1, p2):
    lo, hi = sorted((p1, p2))
    graph, _ = random_instance(np.random.default_rng(seed), n_max=30)
    small = _activated(run_ic(graph, [0], ICConfig(p=lo, rounds=10, rng_seed=seed)))
    large = _activated(run_ic(graph, [0], ICConfig(p=hi, rounds=10, rng_seed=seed)))
    assert small <= large


def test_run_ic_topics_seeds_from_attitudes():
    graph, attitudes = random_instance(np.random.default_rng(12), n_max=40)
    final, trace = run_ic_topics(graph, attitudes, SimulationConfig(rounds=3, ic_probability=1.0))
    for t in range(attitudes.topic_count):
        seeds = attitudes.known(t).tolist()
        expected = _reachable(graph, seeds, hops=3) if seeds else set()
        assert set(final.known(t).tolist()) == expected
