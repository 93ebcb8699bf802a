import random

import pytest
from hypothesis import given, settings, strategies as st

from structree import (AmalgamPresentation, FiniteGroupTable, HNNPresentation, InputError,
                       PresentationError, load_presentation, presentation_from_dict)
from structree.groups import IDENTITY, SubgroupEmbedding, bundled_presentations

NF_PRESENTATIONS = ["z2_z3.json", "z4_z2_z4.json", "hnn_z4_z2.json", "d3.json", "f2.json", "zxz.json", "z.json"]


def relators(pres):
    """Words equal to the identity, built from the defining data only."""
    out = []
    if pres.kind in ("amalgam", "hnn"):
        tables = [pres.H] + ([pres.J] if pres.kind == "amalgam" else [])
        for T in tables:
            for x in T.elements:
                for y in T.elements:
                    if IDENTITY in (x, y):
                        continue
                    xy = T.mul(x, y)
                    out.append([x, y] if xy == IDENTITY else [x, y, T.inv(xy)])
        for a, b in pres.phi.items():
            if a == IDENTITY:
                continue
            if pres.kind == "amalgam":
                out.append([a, pres.J.inv(b)])
            else:
                out.append([pres.t, a, pres.t_inv, pres.H.inv(b)])
    for s in pres.symmetric_generators():
        out.append([s, pres.inverse_letter(s)])
    return out


def random_word(rng, letters, n=10):
    return [rng.choice(letters) for _ in range(rng.randint(0, n))]


@pytest.mark.parametrize("name", ["z2_z3.json", "z4_z2_z4.json", "hnn_z4_z2.json"])
def test_relator_insertion_preserves_normal_form(name):
    pres = load_presentation(name)
    rng = random.Random(7)
    rels = relators(pres)
    gens = pres.symmetric_generators()
    for _ in range(1000):
        w = random_word(rng, gens)
        pos = rng.randint(0, len(w))
        w2 = w[:pos] + rng.choice(rels) + w[pos:]
        a, b = pres.normalize(w), pres.normalize(w2)
        assert a == b
        pres.validate(a)


@pytest.mark.parametrize("name", NF_PRESENTATIONS)
def test_normal_form_idempotent_and_inverse(name):
    pres = load_presentation(name)
    rng = random.Random(1)
    gens = pres.symmetric_generators()
    for _ in range(200):
        g = pres.normalize(random_word(rng, gens))
        assert pres.normalize(pres.letters(g)) == g
        assert pres.multiply(g, pres.inverse(g)) == pres.identity
        pres.validate(g)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["z2_z3.json", "z4_z2_z4.json", "hnn_z4_z2.json"]),
       st.lists(st.integers(0, 3), max_size=8), st.lists(st.integers(0, 3), max_size=8),
       st.lists(st.integers(0, 3), max_size=8))
def test_multiplication_associative(name, u, v, w):
    pres = load_presentation(name)
    gens = pres.symmetric_generators()
    a, b, c = (pres.normalize([gens[i % len(gens)] for i in x]) for x in (u, v, w))
    assert pres.multiply(pres.multiply(a, b), c) == pres.multiply(a, pres.multiply(b, c))


def test_cyclic_table_and_transversal():
    C4 = FiniteGroupTable.cyclic(4)
    assert C4.mul("c", "c3") == IDENTITY
    emb = SubgroupEmbedding(C4, ["1", "c2"])
    assert emb.transversal == ("1", "c")
    assert emb.decompose("c3") == ("c", "c2")


def test_table_axioms_are_named():
    with pytest.raises(PresentationError) as exc:
        FiniteGroupTable(["1", "x", "y"], [["1", "x", "y"], ["x", "1", "1"], ["y", "1", "x"]])
    assert exc.value.axiom in ("associativity", "inverse")
    with pytest.raises(PresentationError) as exc:
        FiniteGroupTable(["1", "x"], [["1", "x"], ["x", "z"]])
    assert exc.value.axiom == "closure"
    with pytest.raises(PresentationError) as exc:
        FiniteGroupTable(["1", "x"], [["x", "1"], ["1", "x"]])
    assert exc.value.axiom == "identity"


def test_phi_must_be_homomorphism():
    C4 = FiniteGroupTable.cyclic(4, "c")
    D4 = FiniteGroupTable.cyclic(4, "d")
    with pytest.raises(PresentationError) as exc:
        AmalgamPresentation(C4, D4, ["1", "c", "c2", "c3"], ["1", "d", "d2", "d3"],
                            {"1": "1", "c": "d", "c2": "d3", "c3": "d2"})
    assert exc.value.axiom == "homomorphism"


def test_hnn_stable_letter_clash():
    C2 = FiniteGroupTable.cyclic(2, "t")
    with pytest.raises(PresentationError):
        HNNPresentation(C2, ["1"], ["1"], {"1": "1"}, stable="t")


def test_bundled_and_missing():
    assert "z2_z3.json" in bundled_presentations()
    with pytest.raises(InputError):
        load_presentation("no_such_group.json")
    with pytest.raises(InputError):
        presentation_from_dict({"kind": "amalgam", "H": {}})


def test_dict_round_trip():
    pres = load_presentation("z4_z2_z4.json")
    again = presentation_from_dict(pres.to_dict())
    w = ["c", "d", "c", "d3", "c2"]
    assert again.token(again.normalize(w)) == pres.token(pres.normalize(w))


def test_amalgam_normal_form_shape():
    pres = load_presentation("z4_z2_z4.json")
    g = pres.normalize(["c", "d", "c3"])
    assert pres.token(g) == "c.d.c.c2"
