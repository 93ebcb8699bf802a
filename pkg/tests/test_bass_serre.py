import copy
import functools

import pytest

from structree import (GroupAction, NoSplitting, Unverifiable, cut_stabilizer, load_presentation,
                       minimal_cuts, optimal_cuts, setwise_stabilizer, stallings_pipeline, truncate,
                       verify_splitting)
from structree.bass_serre import Stabilizer, rebuild_presentation
from structree.families import CayleyGenerator


@functools.lru_cache(maxsize=None)
def pipeline(name):
    return stallings_pipeline(load_presentation(name))


@functools.lru_cache(maxsize=None)
def action(name, radius=5):
    gen = CayleyGenerator(load_presentation(name))
    return GroupAction(gen, truncate(gen, radius))


@pytest.mark.parametrize("name", ["z2_z3.json", "z4_z2_z4.json", "hnn_z4_z2.json"])
def test_action_is_free_and_compatible(name):
    act = action(name)
    grp = act.group
    elems = act.elements()[:20]
    for g in elems:
        for h in elems:
            y = act.apply(g, grp.token(h))
            if y is not None:
                assert y == grp.token(grp.multiply(g, h))
            if g != grp.identity:
                assert y != grp.token(h)


@pytest.mark.parametrize("name", ["z2_z3.json", "z4_z2_z4.json"])
def test_translates_are_minimal_cuts(name):
    act = action(name)
    m = act.model
    cuts = minimal_cuts(m)
    sides = {c.side for c in cuts}
    grp = act.group
    for C in cuts[:10]:
        for g in act.elements()[:15]:
            img = act.map_cut(g, C)
            if img is None:
                continue
            assert img.side in sides
            back = act.map_cut(grp.inverse(g), img)
            if back is not None:
                assert back.side == C.side


def test_cut_stabilizer_closed():
    act = action("z4_z2_z4.json")
    opt = optimal_cuts(minimal_cuts(act.model))
    base = act.model.index[act.gen.base_vertex]
    C = next(c for c in opt if (act.model.beta(c.side) >> base) & 1)
    st = cut_stabilizer(C, act)
    grp = act.group
    assert st.closed and st.tokens[0] == "1"
    for a in st.elements:
        for b in st.elements:
            assert grp.token(grp.multiply(a, b)) in st.tokens
    swap = cut_stabilizer(C, act, swap=True)
    assert set(st.tokens) <= set(swap.tokens)


def test_setwise_stabilizer_of_base_is_trivial():
    act = action("z2_z3.json")
    s = setwise_stabilizer(act.model.mask([act.gen.base_vertex]), act)
    assert s.tokens == ["1"]


# [DERIVED] vertex/edge orders from the stabilizer scans
@pytest.mark.parametrize("name,kind,vertex_orders,edge_order,inversion", [
    ("z2_z2.json", "amalgam", [2, 2], 1, True),
    ("z2_z3.json", "amalgam", [2, 3], 1, True),
    ("z4_z2_z4.json", "amalgam", [4, 4], 2, True),
    ("z.json", "hnn", [1], 1, False),
    ("hnn_z4_z2.json", "hnn", [4], 2, False),
])
def test_stallings_round_trip(name, kind, vertex_orders, edge_order, inversion):
    desc, ev = pipeline(name)
    assert (desc.kind, desc.vertex_orders, desc.edge_order) == (kind, vertex_orders, edge_order)
    assert ev["splitting_report"]["inversion"] is inversion
    assert ev["previous_radius"]["stable"]
    assert not desc.partial
    assert verify_splitting(desc, load_presentation(name), 4)


def test_inversion_gets_subdivided():
    _, ev = pipeline("z2_z3.json")
    rep = ev["splitting_report"]
    assert rep["subdivided_vertices"] == ev["classes"] + ev["tree_edges"]
    assert rep["inversion_after_subdivision"] is False


def test_hnn_over_trivial_for_z():
    desc, ev = pipeline("z.json")
    d = desc.to_dict()
    assert d["base"] == ["1"] and d["A"] == ["1"] and d["B"] == ["1"]
    assert ev["splitting_report"]["quotient"] == "loop"


def test_amalgam_descriptor_json_shape():
    d = pipeline("z4_z2_z4.json")[0].to_dict()
    assert set(d) >= {"kind", "vertex_groups", "edge_group", "embeddings", "orders"}
    assert d["edge_group"] == ["1", "c2"]


def test_one_ended_group_does_not_split():
    with pytest.raises(NoSplitting) as exc:
        stallings_pipeline(load_presentation("zxz.json"))
    assert str(exc.value) == "no splitting: one end"
    assert exc.value.evidence["cut_search"] == "no cut found up to k_max=8"
    assert exc.value.exit_code == 4


def test_finite_group_does_not_split():
    with pytest.raises(NoSplitting) as exc:
        stallings_pipeline(load_presentation("d3.json"))
    assert exc.value.reason == "finite group"


def test_corrupted_descriptor_fails_verification():
    pres = load_presentation("z4_z2_z4.json")
    desc = copy.copy(pipeline("z4_z2_z4.json")[0])
    desc.groups = dict(desc.groups)
    one = desc.groups["edge"]
    desc.groups["edge"] = Stabilizer(one.elements[:1], one.tokens[:1])
    assert desc.edge_order == 1
    assert verify_splitting(desc, pres, 4) is False


def test_swapped_vertex_group_fails_verification():
    pres = load_presentation("z2_z3.json")
    desc = copy.copy(pipeline("z2_z3.json")[0])
    desc.groups = dict(desc.groups)
    desc.groups["J"] = desc.groups["edge"]
    assert verify_splitting(desc, pres, 4) is False


def test_partial_descriptor_is_unverifiable():
    desc = copy.copy(pipeline("z.json")[0])
    desc.partial = True
    with pytest.raises(Unverifiable):
        rebuild_presentation(desc, load_presentation("z.json"))
    with pytest.raises(Unverifiable):
        verify_splitting(desc, load_presentation("z.json"))


def test_free_group_reports_partial_vertex_group():
    # infinite vertex groups can only be seen through the model
    pres = load_presentation("f2.json")
    desc, ev = stallings_pipeline(pres)
    d = desc.to_dict()
    assert desc.kind == "hnn" and desc.partial
    assert d["partial"].startswith("partial group, generators found: ")
    assert desc.edge_order == 1
    with pytest.raises(Unverifiable):
        verify_splitting(desc, pres)
