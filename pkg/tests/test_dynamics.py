import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uape import (AttitudeState, DirectedGraph, IndicatorMode, OpinionState, PersistenceState,
                  attitude_similarity, degroot_update, influence_probability,
                  interest_probability, persistence_update, xor_indicator)

lattice = st.sampled_from([0.0, 0.5, 1.0])
unit = st.floats(0.0, 1.0, allow_nan=False)


@pytest.mark.parametrize("x, y, expected", [(0.5, 0.5, 0), (0, 1, 1), (1, 1, 0)])
def test_xor_indicator(x, y, expected):
    assert xor_indicator(x, y) == expected


def test_degroot_examples():
    assert degroot_update(1.0, [0.0, 0.5]) == 0.5
    assert degroot_update(0.37, []) == 0.37
    assert degroot_update(0.5, [0.5, 0.5, 0.5]) == 0.5


@settings(max_examples=1000)
@given(unit, st.lists(unit, max_size=20))
def test_degroot_stays_within_inputs(own, others):
    out = degroot_update(own, others)
    values = [own, *others]
    assert min(values) - 1e-15 <= out <= max(values) + 1e-15


def test_interest_single_topic():
    op = OpinionState(np.array([[0.2]]))
    assert interest_probability(0, 0, op, [0], reference=np.array([0.9])) == 1.0


def test_interest_equal_distances():
    op = OpinionState(np.array([[0.5, 0.5]]))
    assert interest_probability(0, 0, op, [0, 1], reference=np.array([0.2, 0.8])) == pytest.approx(0.5)


def test_interest_distances_zero_and_099():
    # weights 1/(0+0.01) = 100 and 1/(0.99+0.01) = 1
    op = OpinionState(np.array([[0.0, 0.0]]))
    got = interest_probability(0, 0, op, [0, 1], reference=np.array([0.0, 0.99]))
    assert got == pytest.approx(100 / 101)
    assert got == pytest.approx(0.9901, abs=1e-4)


def test_interest_unknown_opinion_is_neutral():
    op = OpinionState(np.array([[np.nan, 0.5]]))
    assert interest_probability(0, 0, op, [0, 1], reference=np.array([0.5, 0.5])) == 0.5


def test_interest_needs_active_topics():
    op = OpinionState(np.array([[0.5]]))
    with pytest.raises(ValueError):
        interest_probability(0, 0, op, [])


def test_reference_opinions_use_aware_nodes():
    att = AttitudeState(np.array([[0.0, -1.0], [1.0, -1.0], [-1.0, -1.0]]))
    op = OpinionState.from_attitudes(att)
    ref, active = op.reference_opinions(att)
    assert ref[0] == 0.5 and active.tolist() == [True, False]


@settings(max_examples=1000)
@given(st.lists(st.one_of(unit, st.just(float("nan"))), min_size=1, max_size=6), st.data())
def test_interest_normalizes(opinions, data):
    z = len(opinions)
    ref = np.array(data.draw(st.lists(unit, min_size=z, max_size=z)))
    active = data.draw(st.lists(st.integers(0, z - 1), min_size=1, unique=True))
    op = OpinionState(np.array([opinions]))
    total = sum(interest_probability(0, t, op, active, reference=ref) for t in active)
    assert abs(total - 1.0) <= 1e-9


def test_similarity_examples():
    same = AttitudeState(np.array([[0.0, 0.5, 1.0, 0.0], [0.0, 0.5, 1.0, 0.0]]))
    assert attitude_similarity(0, 1, same) == 2.0
    half = AttitudeState(np.array([[1.0], [0.5]]))
    assert attitude_similarity(0, 1, half) == 0.0
    disjoint = AttitudeState(np.array([[1.0, -1.0], [-1.0, 0.0]]))
    assert attitude_similarity(0, 1, disjoint) == 0.0


def test_similarity_gap_is_signed():
    # sender 0 minus recipient 0.5 is -0.5, which is not the 0.5 the indicator tests for
    att = AttitudeState(np.array([[0.0], [0.5]]))
    assert attitude_similarity(0, 1, att) == 1.0
    assert attitude_similarity(1, 0, att) == 0.0


def test_similarity_abs_diff_mode():
    att = AttitudeState(np.array([[0.0, 0.0, 1.0], [0.5, 0.0, 0.0]]))
    expected = math.sqrt(0.5 ** 2 + 1.0 + 0.0)
    assert attitude_similarity(0, 1, att, IndicatorMode.ABS_DIFF) == pytest.approx(expected)


def _two_topic_fixture(sender_t1, recipient_t1, in_edges=1):
    """Sender 0 -> recipient 1, plus extra senders 2.. pointing at 1."""
    n = 2 + (in_edges - 1)
    edges = [(0, 1, 1.0)] + [(k, 1, 1.0) for k in range(2, n)]
    g = DirectedGraph.from_edges(n, edges)
    values = np.full((n, 2), -1.0)
    values[0] = [1.0, sender_t1]
    values[1] = [-1.0, recipient_t1]
    att = AttitudeState(values)
    return g, att, OpinionState.from_attitudes(att)


def test_influence_probability():
    # interest 0.5 (equal gaps of 0.5), similarity 1, in-degree 1
    g, att, op = _two_topic_fixture(0.0, 1.0)
    assert influence_probability(0, 1, 0, g, att, op) == pytest.approx(0.5)
    g, att, op = _two_topic_fixture(0.0, 1.0, in_edges=4)
    assert influence_probability(0, 1, 0, g, att, op) == pytest.approx(0.125)


def test_influence_zero_without_shared_topics():
    g = DirectedGraph.from_edges(2, [(0, 1, 1.0)])
    att = AttitudeState(np.array([[1.0], [-1.0]]))
    assert influence_probability(0, 1, 0, g, att, OpinionState.from_attitudes(att)) == 0.0


def test_influence_clamps():
    # interest 1 (single topic), similarity sqrt(9) = 3, in-degree 2 -> raw 1.5
    n = 3
    g = DirectedGraph.from_edges(n, [(0, 1, 1.0), (2, 1, 1.0)])
    z = 9
    values = np.full((n, z), 0.0)
    att = AttitudeState(values)
    op = OpinionState.from_attitudes(att)
    raw = influence_probability(0, 1, 0, g, att, op, active_topics=[0], clamp=False)
    assert raw == pytest.approx(1.5)
    assert influence_probability(0, 1, 0, g, att, op, active_topics=[0]) == 1.0


def test_influence_requires_incoming_edge():
    g = DirectedGraph.from_edges(2, [(1, 0, 1.0)])
    att = AttitudeState(np.array([[0.0], [0.0]]))
    with pytest.raises(ValueError):
        influence_probability(0, 1, 0, g, att, OpinionState.from_attitudes(att))


def _persistence_after(a, t_u, t_v, p):
    state = PersistenceState(np.array([[a]]))
    att = AttitudeState(np.array([[t_v]]))
    return persistence_update(state, 0, 0, att, (t_u, p)), state


def test_persistence_examples():
    assert _persistence_after(0.5, 1.0, 1.0, 0.2)[0] == pytest.approx(0.7)
    assert _persistence_after(0.5, 1.0, 0.0, 0.2)[0] == pytest.approx(0.3)
    state = PersistenceState(np.array([[0.5]]))
    assert persistence_update(state, 0, 0, AttitudeState(np.array([[0.0]])), None) == 0.5


def test_persistence_averages_whole_history():
    state = PersistenceState(np.array([[0.5]]))
    att = AttitudeState(np.array([[0.0]]))
    a1 = persistence_update(state, 0, 0, att, (0.0, 0.2))   # 0.5 + 0.2
    a2 = persistence_update(state, 0, 0, att, (1.0, 0.4))   # a1 - (-0.2 + 0.4) / 2
    assert a1 == pytest.approx(0.7)
    assert a2 == pytest.approx(0.6)
    assert state.received_count[0, 0] == 2
    assert state.message_log(0, 0) == [(0.0, 0.2), (1.0, 0.4)]


def test_persistence_unknown_recipient_counts_as_neutral():
    assert _persistence_after(0.5, 0.5, -1.0, 0.3)[0] == pytest.approx(0.8)


@settings(max_examples=1000)
@given(unit, st.lists(st.tuples(lattice, unit), max_size=8), st.sampled_from([-1.0, 0.0, 0.5, 1.0]),
       lattice, unit)
def test_persistence_bounds_and_agreement(a0, history, t_v, t_u, p):
    state = PersistenceState(np.array([[a0]]))
    att = AttitudeState(np.array([[t_v]]))
    for msg in history:
        persistence_update(state, 0, 0, att, msg)
    before = float(state.persistence[0, 0])
    fresh = PersistenceState(np.array([[before]]))
    own = 0.5 if t_v == -1.0 else t_v
    after_agree = persistence_update(fresh, 0, 0, att, (own, p))
    assert 0.0 <= after_agree <= 1.0
    assert after_agree >= before
    fresh = PersistenceState(np.array([[before]]))
    after = persistence_update(fresh, 0, 0, att, (t_u, p))
    assert 0.0 <= after <= 1.0
    if t_u != own and p > 1e-12 and before > 0:
        assert after < before


def test_pure_functions_are_deterministic():
    g, att, op = _two_topic_fixture(0.0, 1.0)
    a = influence_probability(0, 1, 0, g, att, op)
    b = influence_probability(0, 1, 0, g, att, op)
    assert a == b
