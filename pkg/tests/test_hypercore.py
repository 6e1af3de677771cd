import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hypercen.errors import HypergraphParseError
from hypercen.hypercore import (
    DirectedHypergraph,
    Graph,
    Hypergraph,
    dumps,
    edge_degrees,
    export_csv,
    from_bipartite,
    import_csv,
    load,
    loads,
    node_degrees,
    project,
    project_directed,
    save,
    to_bipartite,
    validate,
)

unit = st.floats(0.0, 1.0, allow_nan=False, allow_subnormal=False)


def weight_matrices(max_n=10, max_m=10):
    shapes = st.tuples(st.integers(1, max_n), st.integers(1, max_m))
    return shapes.flatmap(lambda s: arrays(np.float64, s, elements=unit))


def brute_projection(w):
    n, m = w.shape
    a = np.zeros((n, n))
    for i in range(n):
        for k in range(n):
            a[i, k] = sum(w[i, j] * w[k, j] for j in range(m))
    return a


# --- validation ------------------------------------------------------------


def test_minimal_hypergraph_is_valid_without_warnings():
    rep = validate(Hypergraph([[1.0], [1.0]]))
    assert rep.valid and not rep.warnings and not rep.errors


def test_out_of_range_weight_is_invalid():
    rep = validate(Hypergraph([[1.5], [1.0]]))
    assert not rep.valid
    assert "out of [0,1]" in rep.errors[0]


def test_non_finite_weight_is_invalid():
    assert not validate(Hypergraph([[np.nan], [1.0]])).valid


def test_empty_edge_and_isolated_node_are_warnings():
    rep = validate(Hypergraph([[1.0, 0.0], [1.0, 0.0], [0.0, 0.0]]))
    assert rep.valid
    assert rep.empty_edges == [1]
    assert rep.isolated_nodes == [2]
    assert any("empty edge" in w for w in rep.warnings)


def test_validate_does_not_mutate():
    h = Hypergraph([[0.5, 0.0], [0.25, 1.0]])
    before = h.weights.copy()
    validate(h)
    assert np.array_equal(h.weights, before)
    assert not h.weights.flags.writeable


# --- projection ------------------------------------------------------------


def test_project_single_edge():
    a = project(Hypergraph([[1.0], [1.0]])).adjacency
    assert np.array_equal(a, [[1.0, 1.0], [1.0, 1.0]])


def test_project_two_edges_matches_hand_product():
    w = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    a = project(Hypergraph(w)).adjacency
    assert np.array_equal(a, [[1, 1, 0], [1, 2, 1], [0, 1, 1]])
    assert np.array_equal(a, brute_projection(w))


def test_project_zero_matrix():
    assert not np.any(project(Hypergraph(np.zeros((3, 2)))).adjacency)


@settings(max_examples=60, deadline=None)
@given(weight_matrices())
def test_projection_properties(w):
    a = project(Hypergraph(w)).adjacency
    assert np.array_equal(a, a.T)
    assert np.all(a >= 0)
    assert np.max(np.abs(a - brute_projection(w)), initial=0.0) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(weight_matrices(), st.floats(0.01, 1.0))
def test_projection_scales_quadratically(w, s):
    a = project(Hypergraph(w)).adjacency
    b = project(Hypergraph(s * w)).adjacency
    nz = a != 0
    assert np.all(np.abs(b[nz] - s * s * a[nz]) <= 1e-12 * np.abs(s * s * a[nz]))
    assert not np.any(b[~nz])


def test_directed_projection_uses_z():
    w = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    z = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.5]])
    dh = DirectedHypergraph(Hypergraph(w), z)
    a = project_directed(dh).adjacency
    # node 0 feeds edge 0 which outputs to node 1; node 1 feeds edge 1 -> node 2
    assert np.array_equal(a, [[0, 1, 0], [0, 0, 0.5], [0, 0, 0]])
    assert list(dh.inputs(0)) == [0] and list(dh.outputs(1)) == [2]


def test_directed_shape_mismatch():
    with pytest.raises(ValueError):
        DirectedHypergraph(Hypergraph(np.ones((2, 2))), np.ones((2, 3)))


# --- bipartite, degrees ----------------------------------------------------


def test_bipartite_links():
    b = to_bipartite(Hypergraph([[1.0], [1.0]]))
    assert (b.left_count, b.right_count) == (2, 1)
    assert b.links() == [(1, 1), (2, 1)]


def test_bipartite_preserves_weights():
    b = to_bipartite(Hypergraph([[0.5, 0.0], [0.0, 0.3]]))
    assert b.biadjacency[0, 0] == 0.5 and b.biadjacency[1, 1] == 0.3


@settings(max_examples=40, deadline=None)
@given(weight_matrices())
def test_bipartite_round_trip_and_degrees(w):
    h = Hypergraph(w)
    b = to_bipartite(h)
    assert from_bipartite(b) == h
    deg = node_degrees(h, weighted=True)
    assert np.array_equal(deg, w @ np.ones(w.shape[1]))
    assert np.array_equal(deg, b.biadjacency @ np.ones(w.shape[1]))


def test_degrees():
    h = Hypergraph([[1.0, 1.0], [0.0, 1.0]])
    assert list(node_degrees(h)) == [2, 1]
    assert list(node_degrees(h, weighted=True)) == [2, 1]
    assert list(edge_degrees(h)) == [1, 2]
    h = Hypergraph([[0.5, 0.5], [0.0, 0.2]])
    assert list(node_degrees(h, weighted=True)) == [1.0, 0.2]
    assert np.allclose(edge_degrees(h, weighted=True), [0.5, 0.7], rtol=0, atol=1e-15)
    z = Hypergraph(np.zeros((2, 3)))
    assert not node_degrees(z).any() and not edge_degrees(z).any()


# --- JSON and CSV ----------------------------------------------------------


def test_minimal_document():
    doc = {"nodes": ["a", "b"], "edges": [{"id": "e", "members": [
        {"node": "a", "w": 1}, {"node": "b", "w": 1}]}]}
    h = loads(json.dumps(doc))
    assert isinstance(h, Hypergraph)
    assert np.array_equal(h.weights, [[1.0], [1.0]])
    assert h.node_labels == ("a", "b") and h.edge_labels == ("e",)


@pytest.mark.parametrize("bad", ["1.5", 1.5, -0.1, "x", None, True])
def test_weight_rejections_carry_location(bad):
    doc = {"nodes": ["a", "b"], "edges": [{"id": "e", "members": [
        {"node": "a", "w": 1}, {"node": "b", "w": bad}]}]}
    with pytest.raises(HypergraphParseError) as exc:
        loads(json.dumps(doc))
    assert exc.value.location == "edges[0].members[1].w"


@pytest.mark.parametrize("doc, where", [
    ({"edges": []}, "nodes"),
    ({"nodes": ["a"], "edges": [{"members": [{"node": "z", "w": 1}]}]},
     "edges[0].members[0].node"),
    ({"nodes": ["a", "a"], "edges": []}, "nodes[1]"),
    ({"nodes": ["a"]}, "edges"),
])
def test_structural_errors(doc, where):
    with pytest.raises(HypergraphParseError) as exc:
        loads(json.dumps(doc))
    assert exc.value.location == where


def test_malformed_json_reports_line():
    with pytest.raises(HypergraphParseError) as exc:
        loads('{"nodes": ["a"],\n "edges": [}')
    assert exc.value.location.startswith("line 2")


def test_random_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    w = rng.random((20, 30)) * (rng.random((20, 30)) < 0.3)
    h = Hypergraph(w)
    save(h, tmp_path / "h.json")
    assert load(tmp_path / "h.json") == h


def test_directed_round_trip():
    dh = DirectedHypergraph(Hypergraph([[1.0, 0.0], [0.5, 0.25]]), [[0.0, 1.0], [0.75, 0.0]])
    back = loads(dumps(dh))
    assert isinstance(back, DirectedHypergraph) and back == dh


def test_graph_round_trip_keeps_loops_and_large_weights():
    a = np.array([[2.0, 0.5, 0.0], [0.5, 0.0, 1.5], [0.0, 1.5, 0.0]])
    g = Graph(a, ["x", "y", "z"])
    back = loads(dumps(g))
    assert isinstance(back, Graph) and back == g


def test_csv_round_trip(tmp_path):
    w = np.array([[0.1, 0.0], [1.0 / 3.0, 0.7], [0.0, 0.0]])
    h = Hypergraph(w, ["a", "b", "c"], ["e1", "e2"])
    export_csv(h, tmp_path / "h.csv")
    lines = (tmp_path / "h.csv").read_text().splitlines()
    assert lines[0] == "node,edge,weight"
    assert "b,e1,0.333333333333" in lines
    back = import_csv(tmp_path / "h.csv", nodes=["a", "b", "c"])
    assert np.allclose(back.weights, w, rtol=1e-12, atol=0)
    assert back.node_labels == h.node_labels


def test_csv_rejects_bad_weight(tmp_path):
    (tmp_path / "bad.csv").write_text("node,edge,weight\na,e,1.5\n")
    with pytest.raises(HypergraphParseError) as exc:
        import_csv(tmp_path / "bad.csv")
    assert "line 2" in str(exc.value.location)
