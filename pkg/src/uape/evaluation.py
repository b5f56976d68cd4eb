"""Activation curves and ROC-AUC scoring against a ground-truth cascade."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np
from scipy.stats import rankdata

from .config import EdgeGate, Model, SimulationConfig
from .engine import CascadeTrace, final_activation, run_monte_carlo, run_uape
from .graph import AttitudeState, DirectedGraph, FormatError, _data_lines, _fields

CURVE_HEADER = "round,topic,positive,neutral,negative,unknown"
CLASS_VALUES = (0.0, 0.5, 1.0, -1.0)


class UndefinedAUCError(ValueError):
    """Labels are all 0 or all 1, so no positive/negative pair exists."""


def apply_trace(initial: AttitudeState, trace: CascadeTrace) -> AttitudeState:
    """Final attitudes implied by replaying ``trace`` over ``initial``."""
    values = initial.values.copy()
    for node, topic, new in zip(trace.node.tolist(), trace.topic.tolist(), trace.new.tolist()):
        values[node, topic] = new
    return AttitudeState(values)


def activation_curve(trace: CascadeTrace, initial: AttitudeState, rounds: int) -> np.ndarray:
    """Counts of each attitude class at the end of every round.

    Returns an int array of shape ``(rounds + 1, z, 4)`` with the last axis
    ordered positive, neutral, negative, unknown; row 0 is the initial state.
    """
    values = initial.values.copy()
    n, z = values.shape
    if len(trace) and trace.round.max() > rounds:
        raise ValueError("trace contains rounds beyond the requested horizon")
    out = np.zeros((rounds + 1, z, 4), dtype=np.int64)
    order = np.argsort(trace.round, kind="stable")
    rnd, node, topic, new = (trace.round[order], trace.node[order], trace.topic[order],
                             trace.new[order])
    # events of different topics never interact, so regrouping by round keeps per-topic order
    k = 0
    for r in range(rounds + 1):
        while k < len(rnd) and rnd[k] <= r:
            values[node[k], topic[k]] = new[k]
            k += 1
        for c, val in enumerate(CLASS_VALUES):
            out[r, :, c] = (values == val).sum(axis=0)
    return out


def write_curve(curve: np.ndarray, out: TextIO) -> None:
    out.write(CURVE_HEADER + "\n")
    for r in range(curve.shape[0]):
        for t in range(curve.shape[1]):
            pos, neu, neg, unk = curve[r, t].tolist()
            out.write(f"{r},{t},{pos},{neu},{neg},{unk}\n")


def read_curve(stream) -> np.ndarray:
    rows = []
    for lineno, line in _data_lines(stream):
        if line == CURVE_HEADER:
            continue
        try:
            rows.append([int(x) for x in line.split(",")])
        except ValueError:
            raise FormatError(f"malformed curve line {line!r}", lineno) from None
    if not rows:
        return np.zeros((0, 0, 4), dtype=np.int64)
    arr = np.array(rows)
    out = np.zeros((arr[:, 0].max() + 1, arr[:, 1].max() + 1, 4), dtype=np.int64)
    out[arr[:, 0], arr[:, 1]] = arr[:, 2:]
    return out


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Rank-based AUC: P(score of random positive > score of random negative), ties count 1/2."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must have the same length")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAUCError("AUC is undefined when every label is the same")
    ranks = rankdata(scores)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass
class GroundTruth:
    """Final activation label per (node, topic), optionally with per-round counts."""

    labels: np.ndarray
    round_counts: np.ndarray | None = None

    @classmethod
    def from_run(cls, initial: AttitudeState, final: AttitudeState,
                 trace: CascadeTrace | None = None, rounds: int | None = None) -> GroundTruth:
        counts = None
        if trace is not None and rounds is not None:
            counts = activation_curve(trace, initial, rounds)
        return cls((final.values != -1.0).astype(np.int64), counts)


def load_truth(stream, graph: DirectedGraph, z: int) -> GroundTruth:
    """Parse ``node,topic,label`` lines; every (node, topic) pair must appear."""
    labels = np.full((graph.node_count, z), -1, dtype=np.int64)
    for lineno, line, fields in _fields(stream):
        if len(fields) != 3:
            raise FormatError(f"malformed truth line {line!r}", lineno)
        try:
            v = graph.node_id(fields[0])
        except KeyError:
            raise FormatError(f"unknown node label {fields[0]!r}", lineno) from None
        try:
            t, lab = int(fields[1]), int(fields[2])
        except ValueError:
            raise FormatError(f"malformed truth line {line!r}", lineno) from None
        if not 0 <= t < z or lab not in (0, 1):
            raise FormatError(f"topic must be < {z} and label 0 or 1 in {line!r}", lineno)
        labels[v, t] = lab
    missing = np.argwhere(labels == -1)
    if len(missing):
        v, t = missing[0]
        raise FormatError(f"truth has no row for node {graph.labels[v]!r}, topic {t}")
    return GroundTruth(labels)


def write_truth(graph: DirectedGraph, truth: GroundTruth, out: TextIO) -> None:
    out.write("# node,topic,label\n")
    n, z = truth.labels.shape
    for v in range(n):
        for t in range(z):
            out.write(f"{graph.labels[v]},{t},{int(truth.labels[v, t])}\n")


def load_scores(stream, graph: DirectedGraph, z: int) -> np.ndarray:
    scores = np.full((graph.node_count, z), np.nan)
    for lineno, line in _data_lines(stream):
        fields = line.split(",")
        if fields == ["node", "topic", "score"]:
            continue
        if len(fields) != 3:
            raise FormatError(f"malformed score line {line!r}", lineno)
        try:
            scores[graph.node_id(fields[0]), int(fields[1])] = float(fields[2])
        except (KeyError, ValueError, IndexError) as exc:
            raise FormatError(f"bad score line {line!r}: {exc}", lineno) from None
    return scores


def write_scores(graph: DirectedGraph, scores: np.ndarray, out: TextIO) -> None:
    out.write("node,topic,score\n")
    n, z = scores.shape
    for v in range(n):
        for t in range(z):
            out.write(f"{graph.labels[v]},{t},{float(scores[v, t])!r}\n")


@dataclass
class EvaluationReport:
    model: str
    auc: dict[int, float]
    curve: np.ndarray | None = None
    truth_counts: np.ndarray | None = None
    metadata: dict[str, str] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"model = {self.model}"]
        lines += [f"{k} = {v}" for k, v in sorted(self.metadata.items())]
        lines += [f"auc.{t} = {self.auc[t]!r}" for t in sorted(self.auc)]
        return "\n".join(lines) + "\n"


def score_topics(scores: np.ndarray, truth: GroundTruth, topics) -> dict[int, float]:
    return {t: roc_auc(scores[:, t], truth.labels[:, t]) for t in topics}


def model_scores(graph, attitudes, config: SimulationConfig, jobs: int = 1,
                 initial_persistence=None) -> np.ndarray:
    """Monte Carlo frequencies for stochastic runs, else the single run's activation."""
    stochastic = config.model is Model.IC or config.edge_gate is EdgeGate.BERNOULLI
    if stochastic and config.monte_carlo_runs > 1:
        return run_monte_carlo(graph, attitudes, config, jobs=jobs,
                               initial_persistence=initial_persistence)
    return final_activation(graph, attitudes, config, initial_persistence).astype(np.float64)


def evaluate_run(graph: DirectedGraph, attitudes: AttitudeState, config: SimulationConfig,
                 truth: GroundTruth, models: Sequence[str] = ("uape", "ic"), jobs: int = 1,
                 initial_persistence=None) -> dict[str, EvaluationReport]:
    """Score each requested model against ``truth``; one report per model."""
    n, z = attitudes.values.shape
    if truth.labels.shape != (n, z):
        raise ValueError("ground truth does not cover every (node, topic) of the graph")
    topics = range(z) if config.topic is None else [config.topic]
    reports = {}
    for name in models:
        cfg = config.replace(model=Model(name))
        scores = model_scores(graph, attitudes, cfg, jobs, initial_persistence)
        if cfg.model is Model.IC:
            from .baselines import run_ic_topics
            _, trace = run_ic_topics(graph, attitudes, cfg)
        else:
            _, trace = run_uape(graph, attitudes, cfg, initial_persistence, record_messages=False)
        reports[name] = EvaluationReport(
            model=name,
            auc=score_topics(scores, truth, topics),
            curve=activation_curve(trace, attitudes, cfg.rounds),
            truth_counts=truth.round_counts,
            metadata={"config_digest": cfg.digest(),
                      "scores_digest": hashlib.sha256(scores.tobytes()).hexdigest()},
        )
    return reports
