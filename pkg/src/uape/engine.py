"""Round engine for multi-topic attitude cascades.

One round: every node aware of the topic at the start of the round sends to
each of its out-neighbors in ascending id order. Each delivered message
updates the recipient's persistence, then its attitude; attitude changes take
effect immediately, while nodes that become aware mid-round only start
sending next round. Opinions are averaged once per round, after all
transitions, from the messages delivered that round.

The inner loop is compiled with numba; :mod:`tests.reference` holds a plain
transcription used as an oracle.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from typing import NamedTuple, TextIO

import numpy as np
from numba import njit

from .config import EdgeGate, IndicatorMode, Model, SimulationConfig
from .dynamics import (OpinionState, PersistenceState, clamp01, interest_kernel,
                       persistence_term, reference_kernel, similarity_kernel)
from .graph import (Attitude, AttitudeState, DirectedGraph, FormatError, _data_lines,
                    format_attitude, parse_attitude)

TRACE_HEADER = "round,node,topic,old,new,sender,p,a"


@njit(cache=True)
def transition(t_q, t_v, p, a):
    """Recipient attitude after one message (lattice in, lattice out)."""
    if t_q == -1.0 or t_q == 0.5:
        return t_v if p > a else 0.5
    same = 1.0 if t_q == t_v else 0.0
    eps = 1.0 if p > a else 0.0
    step = 0.5 if t_v > t_q else -0.5
    return same * t_q + (1.0 - same) * (t_q + eps * step)


@njit(cache=True)
def _run_topic(indptr, targets, weights, in_degree, draws, gate_on, j, rounds, xor_mode,
               att, opin, pers, count, acc, record_log, log_r, log_a, log_p, log_n,
               ev_round, ev_node, ev_old, ev_new, ev_sender, ev_p, ev_a, adj_sizes):
    n, z = att.shape
    reference = np.empty(z)
    active = np.zeros(z, dtype=np.bool_)
    senders = np.empty(n, dtype=np.int64)
    adjacent = np.zeros(n, dtype=np.bool_)
    round_sum = np.zeros(n)
    round_cnt = np.zeros(n, dtype=np.int64)
    touched = np.empty(n, dtype=np.int64)
    n_events = 0
    n_adjacent = 0
    for r in range(1, rounds + 1):
        n_senders = 0
        for v in range(n):
            if att[v, j] != -1.0:
                senders[n_senders] = v
                n_senders += 1
        reference_kernel(att, opin, reference, active)
        n_touched = 0
        for si in range(n_senders):
            v = senders[si]
            for e in range(indptr[v], indptr[v + 1]):
                if gate_on and not draws[r - 1, e] < weights[e]:
                    continue
                q = targets[e]
                t_v = att[v, j]
                old = att[q, j]
                pr = interest_kernel(opin, q, j, reference, active)
                raw = pr * similarity_kernel(att, v, q, xor_mode) / in_degree[q]
                p = clamp01(raw)
                c = count[q, j] + 1
                count[q, j] = c
                if record_log:
                    k = log_n[0]
                    log_r[k] = q
                    log_a[k] = t_v
                    log_p[k] = p
                    log_n[0] = k + 1
                for b in range(3):
                    acc[q, j, b] += persistence_term(t_v, 0.5 * b, p)
                own = 0.5 if old == -1.0 else old
                a = clamp01(pers[q, j] - acc[q, j, int(own * 2.0)] / c)
                pers[q, j] = a
                new = transition(old, t_v, p, a)
                att[q, j] = new
                if not adjacent[q]:
                    adjacent[q] = True
                    n_adjacent += 1
                if round_cnt[q] == 0:
                    touched[n_touched] = q
                    n_touched += 1
                round_sum[q] += t_v
                round_cnt[q] += 1
                if new != old:
                    ev_round[n_events] = r
                    ev_node[n_events] = q
                    ev_old[n_events] = old
                    ev_new[n_events] = new
                    ev_sender[n_events] = v
                    ev_p[n_events] = raw
                    ev_a[n_events] = a
                    n_events += 1
        for ti in range(n_touched):
            q = touched[ti]
            own = opin[q, j]
            if np.isnan(own):
                opin[q, j] = round_sum[q] / round_cnt[q]
            else:
                opin[q, j] = (own + round_sum[q]) / (round_cnt[q] + 1)
            round_sum[q] = 0.0
            round_cnt[q] = 0
        adj_sizes[r - 1] = n_adjacent
    return n_events


class TraceEvent(NamedTuple):
    round: int
    node: int
    topic: int
    old: float
    new: float
    sender: int
    p: float
    a: float


@dataclass
class CascadeTrace:
    """Attitude-change events in execution order, stored column-wise.

    ``p`` is the raw (unclamped) influence of the message that caused the
    change, ``a`` the recipient's persistence after that message (NaN for
    models without persistence). ``adjacent_sizes[t][r - 1]`` is the number of
    distinct recipients of topic ``t`` messages by the end of round ``r``.
    """

    round: np.ndarray
    node: np.ndarray
    topic: np.ndarray
    old: np.ndarray
    new: np.ndarray
    sender: np.ndarray
    p: np.ndarray
    a: np.ndarray
    adjacent_sizes: dict[int, np.ndarray] = field(default_factory=dict)

    @classmethod
    def empty(cls) -> CascadeTrace:
        i = np.zeros(0, dtype=np.int64)
        f = np.zeros(0)
        return cls(i, i.copy(), i.copy(), f, f.copy(), i.copy(), f.copy(), f.copy())

    @classmethod
    def from_events(cls, events) -> CascadeTrace:
        events = list(events)
        if not events:
            return cls.empty()
        cols = list(zip(*events))
        ints = (0, 1, 2, 5)
        return cls(*(np.array(c, dtype=np.int64 if k in ints else np.float64)
                     for k, c in enumerate(cols)))

    @classmethod
    def concat(cls, parts) -> CascadeTrace:
        parts = list(parts)
        if not parts:
            return cls.empty()
        names = ("round", "node", "topic", "old", "new", "sender", "p", "a")
        out = cls(*(np.concatenate([getattr(t, k) for t in parts]) for k in names))
        for t in parts:
            out.adjacent_sizes.update(t.adjacent_sizes)
        return out

    def __len__(self) -> int:
        return len(self.round)

    @property
    def events(self) -> list[TraceEvent]:
        return [TraceEvent(*row) for row in zip(
            self.round.tolist(), self.node.tolist(), self.topic.tolist(), self.old.tolist(),
            self.new.tolist(), self.sender.tolist(), self.p.tolist(), self.a.tolist())]

    def same_events(self, other: CascadeTrace) -> bool:
        return self.events == other.events


def write_trace(trace: CascadeTrace, graph: DirectedGraph, out: TextIO) -> None:
    lab = graph.labels
    out.write(TRACE_HEADER + "\n")
    for ev in trace.events:
        out.write(f"{ev.round},{lab[ev.node]},{ev.topic},{format_attitude(ev.old)},"
                  f"{format_attitude(ev.new)},{lab[ev.sender]},{ev.p!r},{ev.a!r}\n")


def read_trace(stream, graph: DirectedGraph) -> CascadeTrace:
    events = []
    for lineno, line in _data_lines(stream):
        if line == TRACE_HEADER:
            continue
        fields = line.split(",")
        if len(fields) != 8:
            raise FormatError(f"malformed trace line {line!r}", lineno)
        try:
            events.append(TraceEvent(
                int(fields[0]), graph.node_id(fields[1]), int(fields[2]),
                parse_attitude(fields[3]), parse_attitude(fields[4]),
                graph.node_id(fields[5]), float(fields[6]), float(fields[7])))
        except (KeyError, ValueError) as exc:
            raise FormatError(str(exc), lineno) from None
    return CascadeTrace.from_events(events)


@dataclass
class EngineState:
    """Mutable simulation state; partitions and active sets are views of ``attitudes``."""

    attitudes: AttitudeState
    opinions: OpinionState
    persistence: PersistenceState
    adjacent: dict[int, set[int]] = field(default_factory=dict)
    round: int = 0

    @classmethod
    def initial(cls, attitudes: AttitudeState, initial_persistence=0.5) -> EngineState:
        n, z = attitudes.values.shape
        pers = np.broadcast_to(np.asarray(initial_persistence, dtype=np.float64), (n, z)).copy()
        return cls(attitudes.copy(), OpinionState.from_attitudes(attitudes), PersistenceState(pers))

    def active_set(self, topic: int) -> set[int]:
        return set(self.attitudes.known(topic).tolist())

    def partition(self, topic: int, attitude: float) -> set[int]:
        return set(np.flatnonzero(self.attitudes.values[:, topic] == float(attitude)).tolist())

    def partitions(self, topic: int) -> dict[float, set[int]]:
        return {a.value: self.partition(topic, a) for a in (Attitude.POSITIVE, Attitude.NEUTRAL,
                                                             Attitude.NEGATIVE)}


def get_att(q: int, v: int, j: int, a: float, state: EngineState, p: float) -> Attitude:
    """Apply one message from sender ``v`` to recipient ``q`` on topic ``j``.

    ``p`` is the (clamped) influence of the message and ``a`` the recipient's
    persistence after logging it. The new attitude is written into ``state``
    (which also moves ``q`` between partitions) and returned.
    """
    values = state.attitudes.values
    new = transition(values[q, j], values[v, j], p, a)
    if new not in (0.0, 0.5, 1.0):
        raise AssertionError(f"attitude transition left the lattice: {new}")
    values[q, j] = new
    return Attitude(new)


def _topics(config: SimulationConfig, z: int) -> list[int]:
    if config.topic is None:
        return list(range(z))
    if not 0 <= config.topic < z:
        raise ValueError(f"topic {config.topic} out of range for {z} topics")
    return [config.topic]


def _persistence_table(config: SimulationConfig, n: int, z: int, initial_persistence):
    if initial_persistence is None:
        return np.full((n, z), config.initial_persistence)
    table = np.broadcast_to(np.asarray(initial_persistence, dtype=np.float64), (n, z)).copy()
    if np.any((table < 0.0) | (table > 1.0)):
        raise ValueError("initial persistence must lie in [0, 1]")
    return table


def gate_draws(config: SimulationConfig, topics: list[int], m: int) -> dict[int, np.ndarray]:
    """Uniform draws deciding edge delivery, one ``(rounds, m)`` block per topic."""
    if config.edge_gate is not EdgeGate.BERNOULLI:
        return {}
    rng = np.random.default_rng(config.rng_seed)
    return {t: rng.random((config.rounds, m)) for t in topics}


def run_uape(graph: DirectedGraph, attitudes: AttitudeState, config: SimulationConfig,
             initial_persistence=None, record_messages: bool = True):
    """Run the attitude cascade and return ``(final EngineState, CascadeTrace)``.

    With ``config.topic=None`` every topic is run for ``config.rounds`` rounds,
    in topic order, over the same evolving state. ``initial_persistence`` may
    be a scalar or an ``(n, z)`` table overriding ``config.initial_persistence``.
    """
    n, z = attitudes.values.shape
    if n != graph.node_count:
        raise ValueError("attitude table does not match the graph's node count")
    topics = _topics(config, z)
    m = graph.edge_count
    K = config.rounds

    att = np.array(attitudes.values, dtype=np.float64, copy=True)
    opin = OpinionState.from_attitudes(attitudes).values
    pers = _persistence_table(config, n, z, initial_persistence)
    count = np.zeros((n, z), dtype=np.int64)
    acc = np.zeros((n, z, 3))
    draws = gate_draws(config, topics, m)
    no_draws = np.zeros((0, 0))
    xor_mode = config.indicator_mode is IndicatorMode.XOR_INDICATOR

    cap = K * m if record_messages else 0
    parts = []
    logs = []
    for j in topics:
        ev_cap = K * m
        ev = (np.empty(ev_cap, np.int64), np.empty(ev_cap, np.int64), np.empty(ev_cap),
              np.empty(ev_cap), np.empty(ev_cap, np.int64), np.empty(ev_cap), np.empty(ev_cap))
        log_r = np.empty(cap, np.int64)
        log_a = np.empty(cap)
        log_p = np.empty(cap)
        log_n = np.zeros(1, np.int64)
        adj = np.zeros(K, np.int64)
        k = _run_topic(graph.indptr, graph.targets, graph.weights, graph.in_degree,
                       draws.get(j, no_draws), j in draws, j, K, xor_mode,
                       att, opin, pers, count, acc, record_messages, log_r, log_a, log_p, log_n,
                       *ev, adj)
        rounds_, nodes, old, new, senders, p, a = (x[:k] for x in ev)
        part = CascadeTrace(rounds_, nodes, np.full(k, j, np.int64), old, new, senders, p, a,
                            {j: adj})
        parts.append(part)
        ln = int(log_n[0])
        logs.append((log_r[:ln], np.full(ln, j, np.int64), log_a[:ln], log_p[:ln]))

    trace = CascadeTrace.concat(parts)
    if record_messages:
        flat = tuple(np.concatenate([lg[i] for lg in logs]) for i in range(4))
    else:
        flat = None
    persistence = PersistenceState(pers, count, flat)
    adjacent = {}
    for j in topics:
        adjacent[j] = set(np.flatnonzero(count[:, j]).tolist())
    state = EngineState(AttitudeState(att), OpinionState(opin), persistence, adjacent, K)
    return state, trace


def final_activation(graph, attitudes, config, initial_persistence=None) -> np.ndarray:
    """``(n, z)`` 0/1 array of nodes aware of each topic after one run."""
    if config.model is Model.IC:
        from .baselines import run_ic_topics
        final, _ = run_ic_topics(graph, attitudes, config)
    else:
        state, _ = run_uape(graph, attitudes, config, initial_persistence, record_messages=False)
        final = state.attitudes
    return (final.values != -1.0).astype(np.int64)


def _mc_chunk(graph, attitudes, config, initial_persistence, start, stop):
    total = np.zeros(attitudes.values.shape, dtype=np.int64)
    for run in range(start, stop):
        cfg = config.replace(rng_seed=config.rng_seed + run)
        total += final_activation(graph, attitudes, cfg, initial_persistence)
    return total


def run_monte_carlo(graph: DirectedGraph, attitudes: AttitudeState, config: SimulationConfig,
                    runs: int | None = None, jobs: int = 1, initial_persistence=None) -> np.ndarray:
    """Fraction of runs in which each node became aware, shape ``(n, z)``.

    Run ``i`` uses ``rng_seed + i``. Runs are split into contiguous chunks
    across ``jobs`` worker processes; counts are integers, so the merged
    result does not depend on scheduling.
    """
    runs = config.monte_carlo_runs if runs is None else runs
    if runs < 1:
        raise ValueError("need at least one Monte Carlo run")
    jobs = max(1, min(jobs, runs))
    bounds = np.linspace(0, runs, jobs + 1).astype(int)
    chunks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if jobs == 1:
        total = _mc_chunk(graph, attitudes, config, initial_persistence, 0, runs)
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_mc_chunk, graph, attitudes, config, initial_persistence, a, b)
                       for a, b in chunks]
            total = sum(f.result() for f in futures)
    return total / runs
