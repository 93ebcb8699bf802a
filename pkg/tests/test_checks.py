import pytest

from structree import checks


def test_default_seed_all_suites_pass():
    results = checks.run_checks(seed=0)
    assert [r.tag for r in results] == list(checks.SUITES)
    failed = [r.to_dict() for r in results if not r.passed]
    assert not failed


def test_seed_reproducible():
    a = checks.check_finitely(seed=5, graphs=5).to_dict()
    b = checks.check_finitely(seed=5, graphs=5).to_dict()
    assert a == b


def test_select_prefix_and_unknown():
    assert checks.select("lemma") == [t for t in checks.SUITES if t.startswith("lemma:")]
    assert checks.select("tree,ends") == ["tree", "ends"]
    with pytest.raises(ValueError):
        checks.select("lemma:missing")


def test_brute_force_on_cycle():
    from structree import graph_from_edges
    g = graph_from_edges([(f"c{i}", f"c{(i + 1) % 5}") for i in range(5)])
    assert len(checks.brute_force_separators(g, 0, 2)) == 4
