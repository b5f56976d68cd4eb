import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uape import (Attitude, AttitudeState, DirectedGraph, FormatError, generate_synthetic,
                  load_attitude_table, load_edge_list, load_seed_file, out_neighbors)
from uape.graph import seed_sets, write_attitude_table, write_edge_list


def test_load_simple_edge_list():
    g = load_edge_list(["0,1", "1,2"])
    assert g.node_count == 3
    assert g.edge_count == 2
    assert g.in_degree.tolist() == [0, 1, 1]


def test_empty_stream():
    g = load_edge_list([])
    assert (g.node_count, g.edge_count) == (0, 0)


@pytest.mark.parametrize("lines, fragment", [
    (["3,3"], "self-loop"),
    (["0,1", "0,1"], "duplicate"),
    (["0,1,1.5"], "outside"),
    (["0,1,x"], "not a number"),
    (["0,1,0.5,9"], "malformed"),
    (["0,"], "malformed"),
])
def test_edge_list_errors(lines, fragment):
    with pytest.raises(FormatError, match=fragment):
        load_edge_list(lines)


def test_error_reports_line_number():
    with pytest.raises(FormatError) as info:
        load_edge_list("# header\n0,1\n\n2,2\n")
    assert info.value.line == 4


@pytest.mark.parametrize("text", ["a\tb\t0.25\nb\tc\n", "a b 0.25\nb   c\n", "a,b,0.25\nb,c\n"])
def test_separator_detection(text):
    g = load_edge_list(text, default_weight=0.5)
    assert g.labels == ("a", "b", "c")
    assert g.edge_list == [(0, 1, 0.25), (1, 2, 0.5)]


def test_string_labels_are_remapped_in_order_of_appearance():
    g = load_edge_list(["u9,u3", "u3,u7"])
    assert g.labels == ("u9", "u3", "u7")
    assert g.node_id("u7") == 2


def test_out_neighbors():
    g = DirectedGraph.from_edges(4, [(0, 2, 0.3), (0, 1, 0.7)])
    assert out_neighbors(g, 0) == [(1, 0.7), (2, 0.3)]
    assert out_neighbors(g, 3) == []
    with pytest.raises(IndexError):
        out_neighbors(g, 4)


def test_graph_arrays_are_read_only():
    g = DirectedGraph.from_edges(2, [(0, 1, 1.0)])
    with pytest.raises(ValueError):
        g.weights[0] = 0.5


@st.composite
def graphs(draw):
    n = draw(st.integers(0, 12))
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=30)) if pairs else []
    weights = draw(st.lists(st.floats(0, 1), min_size=len(chosen), max_size=len(chosen)))
    return DirectedGraph.from_edges(n, [(a, b, w) for (a, b), w in zip(chosen, weights)])


@given(graphs())
def test_degree_sums_equal_edge_count(g):
    assert g.in_degree.sum() == g.out_degree().sum() == g.edge_count
    for v in range(g.node_count):
        assert g.in_degree[v] == int((g.targets == v).sum())


@given(graphs())
def test_write_then_load_is_identity(g):
    buf = io.StringIO()
    write_edge_list(g, buf)
    again = load_edge_list(io.StringIO(buf.getvalue()))
    assert again.labels == g.labels
    assert again.edge_list == g.edge_list


def test_attitude_table():
    g = load_edge_list(["5,6", "6,7"])
    att = load_attitude_table(["5,0,0.5", "7,1,-1", "6,1,1"], g, 2)
    assert att[g.node_id("5"), 0] is Attitude.NEUTRAL
    assert att[g.node_id("6"), 1] is Attitude.NEGATIVE
    assert att.values[g.node_id("6"), 0] == -1.0
    assert load_attitude_table([], g, 2) == AttitudeState.unknown(3, 2)


@pytest.mark.parametrize("line, fragment", [
    ("5,0,0.3", "off-lattice"),
    ("9,0,0", "unknown node"),
    ("5,2,0", "out of range"),
    ("5,0", "malformed"),
])
def test_attitude_table_errors(line, fragment):
    g = load_edge_list(["5,6"])
    with pytest.raises(FormatError, match=fragment):
        load_attitude_table([line], g, 2)


def test_attitude_table_round_trip():
    g, att, _ = generate_synthetic(30, 60, 3, 7, rng_seed=1)
    buf = io.StringIO()
    write_attitude_table(g, att, buf)
    assert load_attitude_table(io.StringIO(buf.getvalue()), g, 3) == att


def test_attitude_state_rejects_off_lattice():
    with pytest.raises(ValueError):
        AttitudeState(np.array([[0.25]]))


def test_seed_file():
    g = load_edge_list(["a,b", "b,c"])
    entries = load_seed_file(["a", "b,1", "c,*,0.9"], g, 2)
    assert seed_sets(entries, 2) == [[0, 2], [0, 1, 2]]
    assert entries[2].persistence == 0.9
    with pytest.raises(FormatError):
        load_seed_file(["a,0,1.2"], g, 2)


@pytest.mark.parametrize("n, m, z, seeds, rng_seed", [
    (1331, 8737, 1, 20, 42),
    (4028, 23151, 3, 69, 7),
])
def test_generator_shapes(n, m, z, seeds, rng_seed):
    g, att, seed_lists = generate_synthetic(n, m, z, seeds, rng_seed)
    assert (g.node_count, g.edge_count, att.topic_count) == (n, m, z)
    assert not np.any(g.sources == g.targets)
    for t, nodes in enumerate(seed_lists):
        assert len(nodes) == len(set(nodes)) == seeds
        assert sorted(att.known(t).tolist()) == nodes
        assert set(att.values[nodes, t].tolist()) <= {0.0, 0.5, 1.0}


def test_generator_is_deterministic():
    a = generate_synthetic(200, 900, 2, 10, rng_seed=5)
    b = generate_synthetic(200, 900, 2, 10, rng_seed=5)
    assert a[0].edge_list == b[0].edge_list
    assert a[1] == b[1] and a[2] == b[2]
    c = generate_synthetic(200, 900, 2, 10, rng_seed=6)
    assert c[0].edge_list != a[0].edge_list


def test_generator_complete_graph():
    g, _, _ = generate_synthetic(5, 20, 1, 0, rng_seed=0)
    assert g.edge_count == 20


@pytest.mark.parametrize("args", [(3, 7, 1, 0), (3, 2, 1, 4)])
def test_generator_infeasible(args):
    with pytest.raises(ValueError):
        generate_synthetic(*args, rng_seed=0)
