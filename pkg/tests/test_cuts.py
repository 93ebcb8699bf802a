import random

import pytest
from hypothesis import given, settings, strategies as st

from structree import (BudgetExhausted, Cut, InputError, NoCutFound, all_separators,
                       check_corner_minimality, corner_profile, enumerate_separators_containing,
                       graph_from_edges, is_cut, kappa, minimal_cuts)
from structree.checks import random_connected_graph
from structree.cuts import cut_encoding

from oracles import all_cuts, separators_containing


def cycle(n):
    return graph_from_edges([(f"c{i}", f"c{(i + 1) % n}") for i in range(n)])


def test_four_cycle_has_three_separators_through_an_edge():
    g = cycle(4)
    seps = enumerate_separators_containing(g, "c0|c1", 2)
    assert len(seps) == 3
    assert enumerate_separators_containing(g, "c0|c1", 1) == []


def test_bridge_is_the_only_separator_through_it():
    g = graph_from_edges([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")])
    assert [s.encoding(g) for s in enumerate_separators_containing(g, "c|d", 1)] == [["c|d"]]
    assert enumerate_separators_containing(g, "c|d", 2) == []


@pytest.mark.parametrize("seed", range(5))
def test_oracle_equivalence_random(seed):
    rng = random.Random(seed)
    for _ in range(10):
        g = random_connected_graph(rng)
        for e in g.edges:
            for k in range(1, 5):
                got = {frozenset(g.edges[i] for i in s.edges) for s in enumerate_separators_containing(g, e, k)}
                assert got == separators_containing(g, e, k)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_all_separators_lists_each_once(seed):
    g = random_connected_graph(random.Random(seed), n_max=8, m_max=12)
    for k in (1, 2, 3):
        seps = [s.edges for s in all_separators(g, k)]
        assert len(seps) == len(set(seps))
        union = set()
        for e in g.edges:
            union |= separators_containing(g, e, k)
        assert {frozenset(g.edges[i] for i in s) for s in seps} == union


def test_separator_input_errors():
    g = graph_from_edges([("a", "b"), ("b", "end:0"), ("a", "end:1")], end_markers=["end:0", "end:1"])
    with pytest.raises(InputError):
        enumerate_separators_containing(g, "a|b", 0)
    with pytest.raises(InputError):
        enumerate_separators_containing(g, "b|end:0", 1)
    with pytest.raises(InputError):
        enumerate_separators_containing(g, "zz", 1)
    assert enumerate_separators_containing(g, "a|b", 9) == []


def test_budget_exhausted():
    g = random_connected_graph(random.Random(3))
    with pytest.raises(BudgetExhausted):
        for e in g.edges:
            enumerate_separators_containing(g, e, 4, budget=2)


# [DERIVED] frozen from the subset-enumeration oracle
@pytest.mark.parametrize("spec,radius,k,count", [
    ("line", 3, 1, 12),
    ("ladder", 2, 2, 4),
    ("cayley:z2_z3.json", 2, 1, 6),
    ("line:2,3", 2, 5, 28),
])
def test_kappa_and_minimal_cuts_match_oracle(get_model, spec, radius, k, count):
    m = get_model(spec, radius)
    cuts = all_cuts(m)
    kk = min(c[0] for c in cuts)
    oracle = {S for b, S in cuts if b == kk}
    assert (kk, len(oracle)) == (k, count)
    assert kappa(m) == k
    assert {frozenset(c.tokens()) for c in minimal_cuts(m)} == oracle


def test_no_cut_on_one_ended_model(get_model):
    with pytest.raises(NoCutFound) as exc:
        kappa(get_model("grid2d", 4))
    assert str(exc.value) == "no cut found up to k_max=8"


@pytest.mark.parametrize("spec,radius", [("line", 6), ("ladder", 6), ("cross:4", 6), ("tree:4", 3)])
def test_minimal_cuts_closed_under_complement(get_model, spec, radius):
    m = get_model(spec, radius)
    sides = {c.side for c in minimal_cuts(m)}
    assert {m.full & ~s for s in sides} == sides
    assert all(is_cut(m, s) for s in sides)


@pytest.mark.parametrize("spec,radius", [("line", 6), ("ladder", 6), ("cross:4", 6), ("tree:4", 3)])
def test_corner_identity_on_minimal_cuts(get_model, spec, radius):
    m = get_model(spec, radius)
    k = kappa(m)
    cuts = minimal_cuts(m)
    for C in cuts:
        for D in cuts:
            assert corner_profile(C, D).identity_holds(k)
            assert check_corner_minimality(C, D, k).passed


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 2**10 - 1), st.integers(0, 2**10 - 1))
def test_corner_counts_split_both_boundaries(seed, c, d):
    # for arbitrary vertex sets: |δC| + |δD| = a+b+c+d+2e+2f
    g = random_connected_graph(random.Random(seed))
    C, D = Cut(g, c & g.full), Cut(g, d & g.full)
    p = corner_profile(C, D)
    assert len(C.boundary) + len(D.boundary) == p.a + p.b + p.c + p.d + 2 * p.e + 2 * p.f


def test_cross_corner_profile(get_model):
    # [DERIVED] crossing pair-cuts of the 4-cycle hub
    m = get_model("cross:4", 6)
    cuts = minimal_cuts(m)
    C = next(c for c in cuts if c.boundary_tokens() == ["v1|v2", "v3|v4"])
    D = next(c for c in cuts if c.boundary_tokens() == ["v1|v4", "v2|v3"])
    prof = corner_profile(C, D)
    assert sorted([prof.a, prof.b, prof.c, prof.d]) == [1, 1, 1, 1]
    assert (prof.e, prof.f) == (0, 0)


def test_cut_encoding_uses_least_marker_side(get_model):
    m = get_model("line", 3)
    for c in minimal_cuts(m):
        assert "end:0" in cut_encoding(c)
        assert cut_encoding(c) == cut_encoding(c.complement())
