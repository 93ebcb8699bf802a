import networkx as nx
import pytest

from structree import InputError, count_ends, make_generator, truncate
from structree.families import CayleyGenerator, algebraic_end_criterion_check
from structree.groups import load_presentation


def nx_ball(gen, R):
    G = nx.Graph()
    seen = {gen.base_vertex: 0}
    frontier = [gen.base_vertex]
    while frontier:
        nxt = []
        for u in frontier:
            for v in gen.neighbours(u):
                G.add_edge(u, v)
                if v not in seen and seen[u] < R:
                    seen[v] = seen[u] + 1
                    nxt.append(v)
        frontier = nxt
    return G, seen


def oracle_counts(spec, radius, probe=2):
    """(ball size, marker count) from networkx components of the annulus."""
    gen = make_generator(spec)
    G, dist = nx_ball(gen, radius + probe)
    G = G.subgraph(dist)
    ball = {v for v, d in dist.items() if d <= radius}
    annulus = G.subgraph(set(dist) - ball)
    infinite = [c for c in nx.connected_components(annulus) if any(dist[v] == radius + probe for v in c)]
    return len(ball), len(infinite)


# [DERIVED] sizes frozen from the networkx oracle above
@pytest.mark.parametrize("spec,radius,ball,markers", [
    ("line", 4, 9, 2),
    ("tree:4", 2, 17, 36),
    ("ladder", 3, 12, 2),
    ("grid2d", 3, 25, 1),
    ("cross:4", 3, 28, 4),
    ("line:2,3", 3, 19, 2),
])
def test_truncation_sizes(spec, radius, ball, markers):
    t = truncate(make_generator(spec), radius)
    assert (len(t.ball), t.marker_count) == (ball, markers)
    assert oracle_counts(spec, radius) == (ball, markers)


def test_markers_are_protected_and_named():
    m = truncate(make_generator("line"), 3).model
    assert sorted(m.end_markers) == ["end:0", "end:1"]
    for e, (u, v) in zip(m.edges, m.ends):
        touches = m.vertices[u] in m.end_markers or m.vertices[v] in m.end_markers
        assert touches == (e in m.protected)


def test_finite_group_has_no_markers():
    t = truncate(make_generator("cayley:d3.json"), 5)
    assert t.marker_count == 0 and len(t.model.vertices) == 6


@pytest.mark.parametrize("spec,ends", [
    ("line", 2), ("line:2,3", 2), ("ladder", 2), ("grid2d", 1),
    ("tree:4", "infinitely_many"), ("cayley:d3.json", 0), ("cayley:f2.json", "infinitely_many"),
])
def test_count_ends_stable(spec, ends):
    assert count_ends(make_generator(spec), 5) == ends
    assert count_ends(make_generator(spec), 6) == ends


def test_cross_is_not_a_cayley_graph_and_reports_unstable():
    # four rays give equal marker counts at both radii, which the two-radius
    # classifier cannot tell apart from a stable count above two
    assert count_ends(make_generator("cross:4"), 6) == "unstable"


@pytest.mark.parametrize("spec", ["bogus", "tree:x", "ladder:3", "cross:2", "cayley:"])
def test_bad_specs(spec):
    with pytest.raises(InputError):
        make_generator(spec)


def test_bad_radius():
    with pytest.raises(InputError):
        truncate(make_generator("line"), 0)


def test_cayley_tokens_are_normal_forms():
    gen = CayleyGenerator(load_presentation("z2_z3.json"))
    assert gen.base_vertex == "1"
    assert gen.neighbours("1") == frozenset({"a", "b", "b2"})


def test_algebraic_end_criterion_on_half_line():
    gen = make_generator("line")
    rep = algebraic_end_criterion_check(gen, lambda tok: not tok.startswith("-"), 5)
    assert rep["passed"]
    assert rep["counts"] == {"s": [0, 0], "s^-1": [1, 1]}
