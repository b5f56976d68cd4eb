"""Directed social graphs, attitude tables and synthetic corpora.

Nodes carry dense integer ids ``0..n-1``; external labels (arbitrary strings,
typically platform user ids) are kept in ``DirectedGraph.labels`` so outputs
can be written back in the caller's vocabulary.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np


class FormatError(ValueError):
    """Malformed input data. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Attitude(float, enum.Enum):
    UNKNOWN = -1.0
    POSITIVE = 0.0
    NEUTRAL = 0.5
    NEGATIVE = 1.0


LATTICE = (-1.0, 0.0, 0.5, 1.0)
KNOWN_ATTITUDES = (Attitude.POSITIVE, Attitude.NEUTRAL, Attitude.NEGATIVE)


def parse_attitude(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"attitude {text!r} is not a number") from None
    if value not in LATTICE:
        raise ValueError(f"attitude {text!r} is off-lattice (expected one of -1, 0, 0.5, 1)")
    return value


def format_attitude(value: float) -> str:
    return {-1.0: "-1", 0.0: "0", 0.5: "0.5", 1.0: "1"}[float(value)]


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Simple directed graph in CSR form.

    Edges are stored sorted by ``(source, target)``; the position of an edge in
    that order is its edge id, shared by ``sources``, ``targets`` and
    ``weights``.  ``indptr[v]:indptr[v + 1]`` slices the out-edges of ``v``.
    """

    labels: tuple[str, ...]
    indptr: np.ndarray
    sources: np.ndarray
    targets: np.ndarray
    weights: np.ndarray
    in_degree: np.ndarray
    _index: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]],
                   labels: Iterable[str] | None = None) -> DirectedGraph:
        edges = list(edges)
        labels = tuple(str(i) for i in range(n)) if labels is None else tuple(labels)
        if len(labels) != n:
            raise ValueError("label table size does not match node count")
        if len(set(labels)) != n:
            raise ValueError("node labels must be unique")
        if edges:
            src = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
            dst = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
            w = np.fromiter((e[2] for e in edges), dtype=np.float64, count=len(edges))
        else:
            src = np.zeros(0, np.int64)
            dst = np.zeros(0, np.int64)
            w = np.zeros(0, np.float64)
        return cls._build(n, src, dst, w, labels)

    @classmethod
    def _build(cls, n, src, dst, w, labels) -> DirectedGraph:
        if len(src) and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(src == dst):
            raise ValueError("self-loops are not allowed")
        if np.any((w < 0.0) | (w > 1.0)) or np.any(np.isnan(w)):
            raise ValueError("edge weights must lie in [0, 1]")
        order = np.lexsort((dst, src))
        src, dst, w = src[order], dst[order], w[order]
        if len(src) > 1:
            dup = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if dup.any():
                k = int(np.flatnonzero(dup)[0])
                raise ValueError(f"duplicate edge {labels[src[k]]} -> {labels[dst[k]]}")
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        in_degree = np.bincount(dst, minlength=n).astype(np.int64)
        for arr in (indptr, src, dst, w, in_degree):
            arr.setflags(write=False)
        index = {label: i for i, label in enumerate(labels)}
        return cls(tuple(labels), indptr, src, dst, w, in_degree, index)

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return len(self.sources)

    @property
    def edge_list(self) -> list[tuple[int, int, float]]:
        return list(zip(self.sources.tolist(), self.targets.tolist(), self.weights.tolist()))

    def out_degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def node_id(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown node label {label!r}") from None

    def out_neighbors(self, v: int) -> list[tuple[int, float]]:
        """Targets of edges leaving ``v`` with their weights, ascending by target id."""
        if not 0 <= v < self.node_count:
            raise IndexError(f"node {v} out of range for graph with {self.node_count} nodes")
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return list(zip(self.targets[lo:hi].tolist(), self.weights[lo:hi].tolist()))

    def with_weights(self, weights) -> DirectedGraph:
        """Copy of the graph with per-edge weights replaced (edge-id order)."""
        w = np.broadcast_to(np.asarray(weights, dtype=np.float64), self.weights.shape).copy()
        return DirectedGraph._build(self.node_count, self.sources.copy(), self.targets.copy(), w,
                                    self.labels)


def out_neighbors(graph: DirectedGraph, v: int) -> list[tuple[int, float]]:
    return graph.out_neighbors(v)


class AttitudeState:
    """Per (node, topic) attitude table; every entry is a lattice value.

    Backed by an ``(n, z)`` float array. Instances handed out by loaders and the
    generator are read-only; use :meth:`copy` for a mutable table.
    """

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("attitude table must be two-dimensional (nodes x topics)")
        if not np.isin(values, LATTICE).all():
            raise ValueError("attitude table contains off-lattice values")
        self.values = values

    @classmethod
    def unknown(cls, n: int, z: int) -> AttitudeState:
        return cls(np.full((n, z), -1.0))

    @property
    def node_count(self) -> int:
        return self.values.shape[0]

    @property
    def topic_count(self) -> int:
        return self.values.shape[1]

    def __getitem__(self, key) -> Attitude:
        return Attitude(float(self.values[key]))

    def __eq__(self, other) -> bool:
        return isinstance(other, AttitudeState) and np.array_equal(self.values, other.values)

    def copy(self) -> AttitudeState:
        return AttitudeState(self.values.copy())

    def frozen(self) -> AttitudeState:
        values = self.values.copy()
        values.setflags(write=False)
        return AttitudeState(values)

    def known(self, topic: int) -> np.ndarray:
        """Ids of nodes holding a non-UNKNOWN attitude on ``topic``."""
        return np.flatnonzero(self.values[:, topic] != -1.0)

    def with_attitude(self, node: int, topic: int, attitude: float) -> AttitudeState:
        values = self.values.copy()
        values[node, topic] = parse_attitude(str(float(attitude)))
        return AttitudeState(values)


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------

def _lines(stream: TextIO | Iterable[str] | str) -> Iterable[str]:
    if isinstance(stream, str):
        return io.StringIO(stream)
    return stream


def _data_lines(stream) -> Iterable[tuple[int, str]]:
    for lineno, raw in enumerate(_lines(stream), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def _detect_separator(line: str) -> str | None:
    if "\t" in line:
        return "\t"
    if "," in line:
        return ","
    return None  # any run of spaces


def _split(line: str, sep: str | None) -> list[str]:
    parts = line.split(sep)
    return [p.strip() for p in parts]


def _fields(stream) -> Iterable[tuple[int, str, list[str]]]:
    """(line number, line, fields) per data line.

    The separator is fixed by the first line that has one; single-field lines
    before that point are returned whole.
    """
    sep: str | None = "unset"  # type: ignore[assignment]
    for lineno, line in _data_lines(stream):
        if sep == "unset":
            if not any(c in line for c in "\t, "):
                yield lineno, line, [line]
                continue
            sep = _detect_separator(line)
        yield lineno, line, _split(line, sep)


def load_edge_list(stream, default_weight: float = 1.0) -> DirectedGraph:
    """Parse a line-oriented edge list.

    Each data line is ``source<sep>target[<sep>weight]``; the separator (tab,
    comma or spaces) is fixed by the first line holding more than one field. A line holding a single
    label declares a node without adding an edge, which is how isolated nodes
    survive a write/load round trip. Labels get dense ids in order of first
    appearance.
    """
    if not 0.0 <= default_weight <= 1.0:
        raise ValueError("default edge weight must lie in [0, 1]")
    index: dict[str, int] = {}
    labels: list[str] = []
    src: list[int] = []
    dst: list[int] = []
    weights: list[float] = []
    seen: set[tuple[int, int]] = set()

    def node(label: str) -> int:
        i = index.get(label)
        if i is None:
            i = index[label] = len(labels)
            labels.append(label)
        return i

    for lineno, line, fields in _fields(stream):
        if any(not f for f in fields) or len(fields) > 3:
            raise FormatError(f"malformed edge line {line!r}", lineno)
        if len(fields) == 1:
            node(fields[0])
            continue
        if fields[0] == fields[1]:
            raise FormatError(f"self-loop on node {fields[0]!r}", lineno)
        if len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise FormatError(f"edge weight {fields[2]!r} is not a number", lineno) from None
            if not 0.0 <= w <= 1.0:
                raise FormatError(f"edge weight {w} outside [0, 1]", lineno)
        else:
            w = default_weight
        a, b = node(fields[0]), node(fields[1])
        if (a, b) in seen:
            raise FormatError(f"duplicate edge {fields[0]} -> {fields[1]}", lineno)
        seen.add((a, b))
        src.append(a)
        dst.append(b)
        weights.append(w)

    return DirectedGraph._build(len(labels), np.array(src, dtype=np.int64),
                                np.array(dst, dtype=np.int64),
                                np.array(weights, dtype=np.float64), labels)


def write_edge_list(graph: DirectedGraph, out: TextIO, weights: bool = True) -> None:
    """Write ``graph`` so that :func:`load_edge_list` reproduces it exactly.

    All node labels are declared first, in id order, to pin the id assignment.
    """
    out.write("# nodes\n")
    for label in graph.labels:
        out.write(f"{label}\n")
    out.write("# edges: source,target" + (",weight\n" if weights else "\n"))
    lab = graph.labels
    for s, t, w in graph.edge_list:
        if weights:
            out.write(f"{lab[s]},{lab[t]},{w!r}\n")
        else:
            out.write(f"{lab[s]},{lab[t]}\n")


def _parse_topic(text: str, z: int, lineno: int) -> int:
    try:
        topic = int(text)
    except ValueError:
        raise FormatError(f"topic {text!r} is not an integer", lineno) from None
    if not 0 <= topic < z:
        raise FormatError(f"topic {topic} out of range for {z} topics", lineno)
    return topic


def _lookup(graph: DirectedGraph, label: str, lineno: int) -> int:
    try:
        return graph.node_id(label)
    except KeyError:
        raise FormatError(f"unknown node label {label!r}", lineno) from None


def load_attitude_table(stream, graph: DirectedGraph, z: int) -> AttitudeState:
    """Parse ``node,topic,attitude`` lines; unlisted pairs stay UNKNOWN."""
    values = np.full((graph.node_count, z), -1.0)
    assigned = set()
    for lineno, line, fields in _fields(stream):
        if len(fields) != 3 or any(not f for f in fields):
            raise FormatError(f"malformed attitude line {line!r}", lineno)
        v = _lookup(graph, fields[0], lineno)
        topic = _parse_topic(fields[1], z, lineno)
        try:
            att = parse_attitude(fields[2])
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
        if (v, topic) in assigned:
            raise FormatError(f"attitude for node {fields[0]!r}, topic {topic} given twice", lineno)
        assigned.add((v, topic))
        values[v, topic] = att
    values.setflags(write=False)
    return AttitudeState(values)


def write_attitude_table(graph: DirectedGraph, attitudes: AttitudeState, out: TextIO) -> None:
    """Write the non-UNKNOWN entries, node-major."""
    out.write("# node,topic,attitude\n")
    nodes, topics = np.nonzero(attitudes.values != -1.0)
    for v, t in zip(nodes.tolist(), topics.tolist()):
        out.write(f"{graph.labels[v]},{t},{format_attitude(attitudes.values[v, t])}\n")


@dataclass
class SeedEntry:
    node: int
    topic: int | None  # None means every topic
    persistence: float | None = None


def load_seed_file(stream, graph: DirectedGraph, z: int) -> list[SeedEntry]:
    """Parse ``label[,topic[,initial_persistence]]`` lines.

    An empty or ``*`` topic column applies the entry to every topic.
    """
    entries = []
    for lineno, line, fields in _fields(stream):
        if len(fields) > 3 or not fields[0]:
            raise FormatError(f"malformed seed line {line!r}", lineno)
        v = _lookup(graph, fields[0], lineno)
        topic = None
        if len(fields) > 1 and fields[1] not in ("", "*"):
            topic = _parse_topic(fields[1], z, lineno)
        persistence = None
        if len(fields) == 3 and fields[2]:
            try:
                persistence = float(fields[2])
            except ValueError:
                raise FormatError(f"persistence {fields[2]!r} is not a number", lineno) from None
            if not 0.0 <= persistence <= 1.0:
                raise FormatError(f"persistence {persistence} outside [0, 1]", lineno)
        entries.append(SeedEntry(v, topic, persistence))
    return entries


def seed_sets(entries: Iterable[SeedEntry], z: int) -> list[list[int]]:
    """Sorted seed node ids per topic."""
    sets: list[set[int]] = [set() for _ in range(z)]
    for e in entries:
        for t in range(z) if e.topic is None else (e.topic,):
            sets[t].add(e.node)
    return [sorted(s) for s in sets]


def write_seed_file(graph: DirectedGraph, seeds: list[list[int]], out: TextIO) -> None:
    out.write("# node,topic\n")
    for topic, nodes in enumerate(seeds):
        for v in nodes:
            out.write(f"{graph.labels[v]},{topic}\n")


# ---------------------------------------------------------------------------
# Synthetic corpora
# ---------------------------------------------------------------------------

def generate_synthetic(n: int, m: int, z: int, seed_count: int, rng_seed: int,
                       weight: float = 1.0):
    """Uniform random simple digraph with seeded attitudes.

    Returns ``(graph, attitudes, seeds)`` where ``seeds[t]`` is the sorted list
    of seed ids for topic ``t``. Every seed gets an attitude drawn uniformly
    from POSITIVE/NEUTRAL/NEGATIVE; all other entries are UNKNOWN. The output
    is a pure function of the arguments.
    """
    if n < 0 or m < 0 or z < 1 or seed_count < 0:
        raise ValueError("node, edge and seed counts must be non-negative and z >= 1")
    if m > n * (n - 1):
        raise ValueError(f"cannot place {m} distinct edges on {n} nodes (max {n * (n - 1)})")
    if seed_count > n:
        raise ValueError(f"seed count {seed_count} exceeds node count {n}")
    rng = np.random.default_rng(rng_seed)
    if m:
        # index k enumerates ordered pairs (s, t), s != t
        k = rng.choice(n * (n - 1), size=m, replace=False)
        src = k // (n - 1)
        r = k % (n - 1)
        dst = np.where(r < src, r, r + 1)
    else:
        src = dst = np.zeros(0, dtype=np.int64)
    graph = DirectedGraph._build(n, src.astype(np.int64), dst.astype(np.int64),
                                 np.full(m, float(weight)), tuple(str(i) for i in range(n)))
    values = np.full((n, z), -1.0)
    seeds = []
    choices = np.array([0.0, 0.5, 1.0])
    for t in range(z):
        nodes = np.sort(rng.choice(n, size=seed_count, replace=False))
        values[nodes, t] = choices[rng.integers(0, 3, size=seed_count)]
        seeds.append(nodes.tolist())
    values.setflags(write=False)
    return graph, AttitudeState(values), seeds
