import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agmon.errors import (
    AsymmetricAdjacency,
    Disconnected,
    DuplicateEdge,
    IsolatedVertex,
    ParseError,
    RetriesExhausted,
    SchemaViolation,
    SelfLoop,
    SizeTooSmall,
)
from agmon.graph import (
    Graph,
    as_potential,
    gen_cycle,
    gen_grid,
    gen_path,
    gen_random_connected,
    gen_tree_hub,
    load_edge_list,
    load_graph,
    save_graph,
    tree_hub_levels,
    validate,
)


def test_validate_path_ok():
    validate(gen_path(3))


def test_two_disjoint_edges_disconnected():
    with pytest.raises(Disconnected):
        Graph.from_edges(4, [(0, 1), (2, 3)])


def test_asymmetric_adjacency():
    g = Graph(n=3, adjacency=((1,), (0, 2), (1,)))
    validate(g)
    bad = Graph(n=3, adjacency=((1,), (0, 2), ()))
    with pytest.raises(AsymmetricAdjacency) as exc:
        validate(bad)
    assert exc.value.edge == (1, 2)


def test_self_loop_and_duplicate():
    with pytest.raises(SelfLoop):
        Graph.from_edges(3, [(0, 1), (1, 1), (1, 2)])
    with pytest.raises(DuplicateEdge):
        Graph.from_edges(3, [(0, 1), (1, 0), (1, 2)])


def test_single_vertex_rejected():
    with pytest.raises(IsolatedVertex):
        Graph.from_adjacency([()])


def test_small_generators():
    p2 = gen_path(2)
    assert p2.edges.tolist() == [[0, 1]]
    assert p2.degrees == (1, 1)
    c3 = gen_cycle(3)
    assert c3.degrees == (2, 2, 2)
    assert c3.n_edges == 3
    # the 2x2 grid is the 4-cycle 0-1-3-2
    assert gen_grid(2, 2).adjacency == ((1, 2), (0, 3), (0, 3), (1, 2))


@pytest.mark.parametrize(
    "make",
    [lambda: gen_path(1), lambda: gen_cycle(2), lambda: gen_grid(1, 1), lambda: gen_tree_hub(1, 2), lambda: gen_tree_hub(2, 0)],
)
def test_size_too_small(make):
    with pytest.raises(SizeTooSmall):
        make()


def test_tree_hub_q3_k2():
    g, hub = gen_tree_hub(3, 2)
    assert g.n == 14
    assert hub == 13
    assert g.degrees[hub] == 9
    levels = tree_hub_levels(3, 2)
    assert all(g.degrees[v] == 2 for v in np.flatnonzero(levels == 2))
    assert g.degrees[0] == 3
    assert all(g.degrees[v] == 4 for v in np.flatnonzero(levels == 1))


def test_tree_hub_smallest():
    g, hub = gen_tree_hub(2, 1)
    assert g.n == 4
    assert g.degrees[hub] == 2
    assert g.adjacency[0] == (1, 2)


@pytest.mark.parametrize("q,k", [(2, 1), (2, 3), (3, 2), (3, 3), (4, 2), (5, 1)])
def test_tree_hub_counts(q, k):
    g, hub = gen_tree_hub(q, k)
    assert g.n == (q ** (k + 1) - 1) // (q - 1) + 1
    assert g.degrees[0] == q
    assert g.degrees[hub] == q**k
    levels = tree_hub_levels(q, k)
    if k >= 2:
        assert all(g.degrees[v] == 2 for v in np.flatnonzero(levels == k))
    for u, v in g.edges:
        assert abs(levels[u] - levels[v]) == 1


def test_random_forced_by_p_one():
    assert gen_random_connected(2, 1.0, seed=123).edges.tolist() == [[0, 1]]
    k5 = gen_random_connected(5, 1.0, seed=9)
    assert k5.n_edges == 10
    assert set(k5.degrees) == {4}


def test_random_example_instance_is_valid_and_deterministic():
    g = gen_random_connected(8, 0.4, seed=7)
    validate(g)
    assert g == gen_random_connected(8, 0.4, seed=7)


def test_random_retries_exhausted():
    with pytest.raises(RetriesExhausted):
        gen_random_connected(40, 0.01, seed=1, max_retries=5)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 30), p=st.floats(0.2, 1.0), seed=st.integers(0, 2**32 - 1))
def test_random_generator_properties(n, p, seed):
    g = gen_random_connected(n, p, seed)
    validate(g)
    assert g == gen_random_connected(n, p, seed)


@pytest.mark.parametrize("g", [gen_path(7), gen_cycle(9), gen_grid(3, 4), gen_tree_hub(3, 3)[0]])
def test_generators_validate(g):
    validate(g)


def test_save_load_round_trip(tmp_path):
    g = gen_path(3)
    path = tmp_path / "p3.json"
    save_graph(g, [0.0, 1.0, 0.0], path)
    g2, w2 = load_graph(path)
    assert g2 == g
    assert w2.tolist() == [0.0, 1.0, 0.0]


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(2, 20), data=st.data())
def test_round_trip_exact(tmp_path_factory, seed, n, data):
    g = gen_random_connected(n, 0.5, seed)
    w = data.draw(st.lists(st.floats(-1e12, 1e12, allow_nan=False), min_size=n, max_size=n))
    path = tmp_path_factory.mktemp("rt") / "g.json"
    save_graph(g, w, path)
    g2, w2 = load_graph(path)
    assert g2 == g
    assert w2.tolist() == [float(x) for x in w]


def _write(tmp_path, doc):
    path = tmp_path / "g.json"
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return path


def test_load_self_loop(tmp_path):
    with pytest.raises(SelfLoop):
        load_graph(_write(tmp_path, {"n": 2, "edges": [[0, 0]], "potential": [0, 0]}))


def test_load_missing_potential(tmp_path):
    with pytest.raises(SchemaViolation) as exc:
        load_graph(_write(tmp_path, {"n": 2, "edges": [[0, 1]]}))
    assert exc.value.field == "potential"


@pytest.mark.parametrize(
    "doc",
    [
        {"n": 2, "edges": [[1, 0]], "potential": [0, 0]},
        {"n": 2, "edges": [[0, 5]], "potential": [0, 0]},
        {"n": 2, "edges": [[0, 1]], "potential": [0]},
        {"n": 2, "edges": [[0, 1]], "potential": [0, "x"]},
        {"n": "2", "edges": [[0, 1]], "potential": [0, 0]},
        [1, 2],
    ],
)
def test_load_schema_violations(tmp_path, doc):
    with pytest.raises(SchemaViolation):
        load_graph(_write(tmp_path, doc))


def test_load_parse_error_has_line(tmp_path):
    with pytest.raises(ParseError, match="line 2"):
        load_graph(_write(tmp_path, '{"n": 2,\n "edges": [[0 1]]}'))


def test_load_disconnected_file(tmp_path):
    with pytest.raises(Disconnected):
        load_graph(_write(tmp_path, {"n": 4, "edges": [[0, 1], [2, 3]], "potential": [0, 0, 0, 0]}))


def test_edge_list_format(tmp_path):
    edges = tmp_path / "e.txt"
    pot = tmp_path / "w.txt"
    edges.write_text("# P3\n0 1\n\n2 1\n")
    pot.write_text("0\n10\n0\n")
    g, w = load_edge_list(edges, pot)
    assert g == gen_path(3)
    assert w.tolist() == [0.0, 10.0, 0.0]
    edges.write_text("0 1\n1 0\n1 2\n")
    with pytest.raises(DuplicateEdge):
        load_edge_list(edges, pot)
    edges.write_text("0 1 2\n")
    with pytest.raises(ParseError, match="line 1"):
        load_edge_list(edges, pot)


def test_potential_checks():
    with pytest.raises(ValueError):
        as_potential([0.0, np.nan])
    w = as_potential([1, 2, 3], 3)
    assert not w.flags.writeable
