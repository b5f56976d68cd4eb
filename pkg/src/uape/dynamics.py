"""Opinion averaging, topic interest, influence and attitude persistence.

The scalar kernels are numba-compiled so the round engine can call them from
its compiled loop; the public functions wrap them with the table-level
signatures used by the rest of the package. Everything here is pure except
:func:`persistence_update`, which writes into the ``PersistenceState`` it is
given.
"""

from __future__ import annotations

import enum
import math
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .graph import AttitudeState, DirectedGraph

# Added to |opinion gap| so a zero gap still yields a finite weight.
INTEREST_OFFSET = 0.01
NEUTRAL_OPINION = 0.5


class IndicatorMode(str, enum.Enum):
    """How attitude pairs are scored in the similarity factor.

    ``XOR_INDICATOR`` counts shared topics whose signed attitude gap is not
    exactly 0.5. ``ABS_DIFF`` scores each shared topic by ``(1 - |gap|)**2``.
    """

    XOR_INDICATOR = "xor_indicator"
    ABS_DIFF = "abs_diff"


# ---------------------------------------------------------------------------
# compiled kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def indicator(x, y):
    return 0.0 if x == y else 1.0


@njit(cache=True)
def similarity_kernel(att, u, v, xor_mode):
    total = 0.0
    for t in range(att.shape[1]):
        a = att[u, t]
        b = att[v, t]
        if a == -1.0 or b == -1.0:
            continue
        if xor_mode:
            total += indicator(a - b, 0.5)
        else:
            d = 1.0 - abs(a - b)
            total += d * d
    return math.sqrt(total)


@njit(cache=True)
def interest_kernel(opinions, v, topic, reference, active):
    own_i = opinions[v, topic]
    if math.isnan(own_i):
        own_i = NEUTRAL_OPINION
    num = 1.0 / (abs(own_i - reference[topic]) + INTEREST_OFFSET)
    den = 0.0
    for t in range(opinions.shape[1]):
        if not active[t]:
            continue
        own = opinions[v, t]
        if math.isnan(own):
            own = NEUTRAL_OPINION
        den += 1.0 / (abs(own - reference[t]) + INTEREST_OFFSET)
    return num / den


@njit(cache=True)
def reference_kernel(att, opinions, reference, active):
    """Mean opinion of aware nodes per topic; topics with no aware node are inactive."""
    n, z = att.shape
    for t in range(z):
        s = 0.0
        c = 0
        for v in range(n):
            if att[v, t] != -1.0:
                s += opinions[v, t]
                c += 1
        active[t] = c > 0
        reference[t] = s / c if c > 0 else NEUTRAL_OPINION


@njit(cache=True)
def persistence_term(t_sender, t_own, p):
    return abs(t_sender - t_own) * p - (1.0 - indicator(t_sender, t_own)) * p


@njit(cache=True)
def clamp01(x):
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


# ---------------------------------------------------------------------------
# state tables
# ---------------------------------------------------------------------------

class OpinionState:
    """Continuous opinion per (node, topic); NaN marks an undefined opinion."""

    def __init__(self, values: np.ndarray):
        self.values = np.asarray(values, dtype=np.float64)

    @classmethod
    def from_attitudes(cls, attitudes: AttitudeState) -> OpinionState:
        values = attitudes.values.copy()
        values[values == -1.0] = np.nan
        return cls(values)

    def copy(self) -> OpinionState:
        return OpinionState(self.values.copy())

    def reference_opinions(self, attitudes: AttitudeState) -> tuple[np.ndarray, np.ndarray]:
        """(per-topic public opinion, per-topic active flag) for the current state."""
        z = self.values.shape[1]
        reference = np.empty(z)
        active = np.zeros(z, dtype=np.bool_)
        reference_kernel(attitudes.values, self.values, reference, active)
        return reference, active


class PersistenceState:
    """Persistence value, received-message count and message log per (node, topic).

    The log can be supplied in flat form (parallel arrays of recipient, topic,
    sender attitude, influence probability, in delivery order), which is what
    the engine produces; it is grouped per (node, topic) on first access.
    """

    def __init__(self, persistence: np.ndarray, received_count: np.ndarray | None = None,
                 flat_log: tuple[np.ndarray, ...] | None = None):
        self.persistence = np.asarray(persistence, dtype=np.float64)
        if received_count is None:
            received_count = np.zeros(self.persistence.shape, dtype=np.int64)
        self.received_count = received_count
        self._flat = flat_log
        self._logs: dict[tuple[int, int], list[tuple[float, float]]] | None = (
            None if flat_log is not None else {})

    @classmethod
    def initial(cls, n: int, z: int, value: float = 0.5) -> PersistenceState:
        return cls(np.full((n, z), float(value)))

    def _grouped(self) -> dict:
        if self._logs is None:
            logs: dict = {}
            recipient, topic, att, p = self._flat
            for r, t, a, pp in zip(recipient.tolist(), topic.tolist(), att.tolist(), p.tolist()):
                logs.setdefault((r, t), []).append((a, pp))
            self._logs = logs
            self._flat = None
        return self._logs

    def message_log(self, v: int, i: int) -> list[tuple[float, float]]:
        return list(self._grouped().get((v, i), ()))

    def append(self, v: int, i: int, message: tuple[float, float]) -> None:
        self._grouped().setdefault((v, i), []).append((float(message[0]), float(message[1])))
        self.received_count[v, i] += 1

    def copy(self) -> PersistenceState:
        clone = PersistenceState(self.persistence.copy(), self.received_count.copy())
        clone._logs = {k: list(v) for k, v in self._grouped().items()}
        return clone


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def xor_indicator(x: float, y: float) -> int:
    """0 when ``x == y`` exactly, else 1. Its complement ``1 - xor_indicator`` is the 'same' test."""
    return int(indicator(float(x), float(y)))


def degroot_update(own_opinion: float, neighbor_opinions: Sequence[float]) -> float:
    """Mean of the node's own opinion and the opinions it received."""
    total = 0.0
    for x in neighbor_opinions:
        total += x
    return (own_opinion + total) / (len(neighbor_opinions) + 1)


def interest_probability(v: int, i: int, opinions: OpinionState,
                         active_topics: Iterable[int],
                         attitudes: AttitudeState | None = None,
                         reference: np.ndarray | None = None) -> float:
    """Share of node ``v``'s interest that falls on topic ``i``.

    Interest in topic ``j`` is ``1 / (|O_v,j - ref_j| + 0.01)`` where ``ref_j``
    is the mean opinion of nodes aware of ``j``. Pass ``attitudes`` to derive
    awareness, or ``reference`` to supply the public opinions directly; with
    neither, the mean of the defined opinions is used.
    """
    z = opinions.values.shape[1]
    active = np.zeros(z, dtype=np.bool_)
    for t in active_topics:
        active[t] = True
    if not active.any():
        raise ValueError("interest probability needs at least one active topic")
    if not active[i]:
        raise ValueError(f"topic {i} is not among the active topics")
    if reference is None:
        if attitudes is not None:
            reference, _ = opinions.reference_opinions(attitudes)
        else:
            reference = np.array([
                np.nanmean(col) if np.isfinite(col).any() else NEUTRAL_OPINION
                for col in opinions.values.T
            ])
    return float(interest_kernel(opinions.values, v, i, np.asarray(reference, np.float64), active))


def attitude_similarity(u: int, v: int, attitudes: AttitudeState,
                        op: IndicatorMode = IndicatorMode.XOR_INDICATOR) -> float:
    """Square-root similarity over topics both nodes hold a known attitude on; 0 if none."""
    return float(similarity_kernel(attitudes.values, u, v, IndicatorMode(op) is IndicatorMode.XOR_INDICATOR))


def influence_probability(u: int, v: int, i: int, graph: DirectedGraph, attitudes: AttitudeState,
                          opinions: OpinionState, active_topics: Iterable[int] | None = None,
                          op: IndicatorMode = IndicatorMode.XOR_INDICATOR,
                          clamp: bool = True) -> float:
    """Influence of sender ``u`` on recipient ``v`` for topic ``i``.

    ``interest(v, i) * similarity(u, v) / in_degree(v)``, clamped to [0, 1]
    unless ``clamp=False``. ``active_topics`` defaults to the topics some node
    is aware of.
    """
    indeg = int(graph.in_degree[v])
    if indeg == 0:
        raise ValueError(f"node {v} has no incoming edges; no message can reach it")
    reference, active = opinions.reference_opinions(attitudes)
    if active_topics is None:
        active_topics = np.flatnonzero(active).tolist()
    pr = interest_probability(v, i, opinions, active_topics, reference=reference)
    raw = pr * attitude_similarity(u, v, attitudes, op) / indeg
    return float(clamp01(raw)) if clamp else raw


def effective_attitude(t: float) -> float:
    """Attitude used in persistence arithmetic; UNKNOWN counts as neutral."""
    return NEUTRAL_OPINION if t == -1.0 else float(t)


def persistence_update(state: PersistenceState, v: int, i: int, attitudes: AttitudeState,
                       new_message: tuple[float, float] | None) -> float:
    """Log ``new_message`` (sender attitude, influence) for ``(v, i)`` and refresh persistence.

    Agreement with a logged sender raises persistence by that message's
    influence, disagreement lowers it by gap * influence; the total is averaged
    over all messages received so far and the result clamped to [0, 1].
    With nothing logged the persistence is returned unchanged.
    """
    if new_message is not None:
        state.append(v, i, new_message)
    log = state.message_log(v, i)
    if not log:
        return float(state.persistence[v, i])
    t_v = effective_attitude(attitudes.values[v, i])
    total = 0.0
    for t_u, p in log:
        total += persistence_term(t_u, t_v, p)
    a = clamp01(state.persistence[v, i] - total / len(log))
    state.persistence[v, i] = a
    return float(a)
