import json

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from structree import EndMarkedGraph, InputError, barycentric_subdivision, graph_from_edges
from structree.graph import QuotientMultigraph, iter_bits


def path_graph(n):
    return graph_from_edges([(f"p{i}", f"p{i + 1}") for i in range(n - 1)])


def test_masks_round_trip():
    g = path_graph(5)
    m = g.mask(["p1", "p3"])
    assert g.tokens(m) == ["p1", "p3"]
    assert g.complement(m) == g.full & ~m


def test_boundary_and_beta():
    g = path_graph(5)
    C = g.mask(["p0", "p1"])
    assert g.edge_boundary(C) == frozenset({"p1|p2"})
    assert g.tokens(g.beta(C)) == ["p1", "p2"]
    assert g.tokens(g.neighbour_set(C)) == ["p2"]


def test_disconnected_graph_rejected():
    with pytest.raises(InputError):
        graph_from_edges([("a", "b"), ("c", "d")])


def test_components_of_subset():
    g = path_graph(5)
    A = g.mask(["p0", "p1", "p3", "p4"])
    assert not g.is_connected(A)
    assert sorted(g.tokens(c) for c in g.components(A)) == [["p0", "p1"], ["p3", "p4"]]


def test_marker_edges_are_protected():
    g = graph_from_edges([("a", "b"), ("b", "end:0")], end_markers=["end:0"])
    assert "b|end:0" in g.protected
    assert g.is_marker("end:0")


@pytest.mark.parametrize("bad", [
    {"vertices": []},
    {"vertices": [{"id": "a", "end_marker": False}], "edges": [{"id": "e", "u": "a", "v": "z", "protected": False}]},
    {"vertices": [{"id": "a", "end_marker": False}, {"id": "a", "end_marker": False}], "edges": []},
])
def test_bad_graph_json(bad):
    with pytest.raises(InputError):
        EndMarkedGraph.from_dict(bad)


def test_invalid_json_text():
    with pytest.raises(InputError):
        EndMarkedGraph.from_json("{not json")


def test_marker_edge_must_be_protected():
    with pytest.raises(InputError):
        EndMarkedGraph(["a", "m"], [("e", "a", "m")], ["m"], [])


def test_json_round_trip():
    g = graph_from_edges([("a", "b"), ("b", "c"), ("c", "end:0")], end_markers=["end:0"])
    h = EndMarkedGraph.from_json(g.to_json())
    assert h.to_dict() == g.to_dict()
    assert json.loads(g.to_json()) == g.to_dict()


def test_barycentric_subdivision():
    g = path_graph(3)
    s, origin = barycentric_subdivision(g)
    assert len(s.vertices) == 5 and len(s.edges) == 4
    assert origin["<p0|p1>"] == ("edge", "p0|p1")


def test_quotient_classify():
    assert QuotientMultigraph(["v"], ["e"], {"e": "v"}, {"e": "v"}).classify() == "loop"
    assert QuotientMultigraph(["u", "v"], ["e"], {"e": "u"}, {"e": "v"}).classify() == "segment"
    assert QuotientMultigraph(["u", "v"], ["e", "f"], {"e": "u", "f": "u"}, {"e": "v", "f": "v"}).classify() == "other"


@given(st.integers(min_value=0, max_value=2**200))
def test_iter_bits_matches_binary(mask):
    assert list(iter_bits(mask)) == [i for i, b in enumerate(reversed(bin(mask)[2:])) if b == "1"]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), min_size=1, max_size=14))
def test_distances_match_networkx(pairs):
    # a spine keeps the graph connected
    pairs = {tuple(sorted(p)) for p in pairs if p[0] != p[1]} | {(i, i + 1) for i in range(7)}
    g = graph_from_edges([(f"n{u}", f"n{v}") for u, v in pairs])
    G = nx.Graph([(f"n{u}", f"n{v}") for u, v in pairs])
    src = g.vertices[0]
    want = nx.single_source_shortest_path_length(G, src)
    got = {g.vertices[i]: d for i, d in g.distances_from(0).items()}
    assert got == want
    drop = g.mask(["n3"])
    assert g.is_connected(g.full & ~drop) == nx.is_connected(G.subgraph(set(G) - {"n3"}))
