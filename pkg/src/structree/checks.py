"""Property suites behind ``structree check``.

Each suite has a tag (``lemma:intersection``, ``tree``, ...) and returns a
:class:`CheckResult`.  Randomized suites draw from ``random.Random(seed)``
so a run is reproducible from its seed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .bass_serre import stallings_pipeline, verify_splitting
from .cuts import (check_corner_minimality, corner_profile, enumerate_separators_containing,
                   kappa, minimal_cuts)
from .errors import NoSplitting
from .families import count_ends, make_generator, truncate
from .graph import EndMarkedGraph, graph_from_edges
from .groups import load_presentation
from .nesting import (check_corner_inequality, check_not_nested_corner, is_nested, m_index,
                      nested_by_corners, nested_by_inclusion, nested_by_relation, optimal_cuts)
from .structure import (CutSystem, block_intersection_graph, blocks, build_tree,
                        check_block_lemma)

MODELS = (("line", 6), ("ladder", 6), ("cross:4", 6), ("tree:4", 3),
          ("cayley:z2_z3.json", 6), ("cayley:z4_z2_z4.json", 6))


@dataclass
class CheckResult:
    tag: str
    passed: bool
    cases: int = 0
    failures: list = field(default_factory=list)

    def to_dict(self):
        return {"tag": self.tag, "passed": self.passed, "cases": self.cases,
                "failures": self.failures[:10]}


def _models(specs=MODELS):
    for spec, r in specs:
        yield spec, truncate(make_generator(spec), r).model


def random_connected_graph(rng: random.Random, n_max=10, m_max=16) -> EndMarkedGraph:
    n = rng.randint(3, n_max)
    verts = [f"x{i}" for i in range(n)]
    edges = set()
    for i in range(1, n):
        j = rng.randrange(i)
        edges.add((verts[j], verts[i]))
    pool = [(verts[i], verts[j]) for i in range(n) for j in range(i + 1, n) if (verts[i], verts[j]) not in edges]
    rng.shuffle(pool)
    extra = rng.randint(0, max(0, min(m_max, n * (n - 1) // 2) - len(edges)))
    edges |= set(pool[:extra])
    return graph_from_edges(sorted(edges))


def brute_force_separators(g: EndMarkedGraph, e: int, k: int) -> set:
    """``k``-subsets of unprotected edges containing ``e`` that are separators."""
    free = [i for i in range(len(g.edges)) if i != e and i not in g.protected_idx]
    out = set()
    for rest in itertools.combinations(free, k - 1):
        F = frozenset(rest) | {e}
        x = g.ends[e][0]
        side = g.component_of(x, removed=F)
        if sorted(g.boundary_idx(side)) == sorted(F) and g.is_connected(g.full & ~side):
            out.add(F)
    return out


def check_finitely(seed=0, graphs=50, k_max=4) -> CheckResult:
    rng = random.Random(seed)
    res = CheckResult("lemma:finitely", True)
    for _ in range(graphs):
        g = random_connected_graph(rng)
        for e in range(len(g.edges)):
            for k in range(1, k_max + 1):
                res.cases += 1
                got = {s.edges for s in enumerate_separators_containing(g, e, k)}
                if got != brute_force_separators(g, e, k):
                    res.passed = False
                    res.failures.append({"graph": g.to_dict(), "edge": g.edges[e], "k": k})
    return res


def check_intersection(seed=0) -> CheckResult:
    res = CheckResult("lemma:intersection", True)
    for spec, m in _models(MODELS[:4]):
        k = kappa(m)
        cuts = minimal_cuts(m)
        for C in cuts:
            for D in cuts:
                res.cases += 1
                prof = corner_profile(C, D)
                rep = check_corner_minimality(C, D, k)
                if not prof.identity_holds(k) or not rep.passed:
                    res.passed = False
                    res.failures.append({"model": spec, "C": C.boundary_tokens(),
                                         "D": D.boundary_tokens(), "profile": rep.to_dict()})
    return res


def check_nesting_forms(seed=0, pairs=300) -> CheckResult:
    rng = random.Random(seed)
    res = CheckResult("nesting:characterizations", True)
    for spec, m in _models(MODELS[:3]):
        for _ in range(pairs):
            C, D = rng.getrandbits(len(m.vertices)), rng.getrandbits(len(m.vertices))
            res.cases += 1
            vals = {nested_by_inclusion(C, D, m), nested_by_relation(C, D, m),
                    nested_by_corners(C, D, m), is_nested(C, D, m)}
            if len(vals) != 1:
                res.passed = False
                res.failures.append({"model": spec, "C": m.tokens(C), "D": m.tokens(D)})
    return res


def check_not_nested_corner_suite(seed=0) -> CheckResult:
    res = CheckResult("lemma:not_nested_corner", True)
    for spec, m in _models():
        cuts = minimal_cuts(m)
        if len(cuts) > 40:
            continue
        rep = check_not_nested_corner(cuts)
        res.cases += rep["triples"]
        if not rep["passed"]:
            res.passed = False
            res.failures += [dict(f, model=spec) for f in rep["failures"]]
    return res


def check_corners_equality(seed=0) -> CheckResult:
    res = CheckResult("lemma:corners_equality", True)
    for spec, m in _models():
        cuts = minimal_cuts(m)
        idx = m_index(cuts)
        for C in cuts:
            if idx.values[C] == 0:
                continue
            for D in cuts:
                rep = check_corner_inequality(C, D, cuts, idx)
                if rep.status == "applicable":
                    res.cases += 1
                    if not rep.passed:
                        res.passed = False
                        res.failures.append({"model": spec, "m": rep.m_values})
    return res


def check_optimally(seed=0) -> CheckResult:
    res = CheckResult("theorem:optimally", True)
    for spec, m in _models():
        opt = optimal_cuts(minimal_cuts(m))
        for i, C in enumerate(opt):
            for D in opt[i + 1:]:
                res.cases += 1
                if not is_nested(C, D):
                    res.passed = False
                    res.failures.append({"model": spec, "C": C.boundary_tokens(), "D": D.boundary_tokens()})
    return res


def check_trees(seed=0) -> CheckResult:
    res = CheckResult("tree", True)
    for spec, m in _models():
        res.cases += 1
        T = build_tree(CutSystem(optimal_cuts(minimal_cuts(m))))
        if len(T.classes) != len(T.edges) + 1:
            res.passed = False
            res.failures.append({"model": spec})
    return res


def check_blocks(seed=0) -> CheckResult:
    res = CheckResult("blocks", True)
    for spec, m in _models((("line", 6), ("tree:4", 2), ("cross:4", 6))):
        sys = CutSystem(optimal_cuts(minimal_cuts(m)))
        bl = blocks(sys)
        rep = check_block_lemma(sys, bl)
        res.cases += 1
        if not rep["passed"]:
            res.passed = False
            res.failures.append({"model": spec, "report": rep})
        if spec == "tree:4":
            inter = block_intersection_graph(sys, bl)
            # documented finding: intersection adjacency is not a tree here
            if inter["is_tree"]:
                res.passed = False
                res.failures.append({"model": spec, "unexpected": "intersection graph is a tree"})
    return res


def check_normal_forms(seed=0, pairs=200) -> CheckResult:
    rng = random.Random(seed)
    res = CheckResult("lemma:normalform", True)
    for name in ("z2_z3.json", "z4_z2_z4.json", "hnn_z4_z2.json"):
        pres = load_presentation(name)
        letters = pres.symmetric_generators()
        for _ in range(pairs):
            word = [rng.choice(letters) for _ in range(rng.randint(0, 10))]
            pos = rng.randint(0, len(word))
            s = rng.choice(letters)
            padded = word[:pos] + [s, pres.inverse_letter(s)] + word[pos:]
            res.cases += 1
            a, b = pres.normalize(word), pres.normalize(padded)
            if a != b:
                res.passed = False
                res.failures.append({"presentation": name, "word": word, "padded": padded})
            else:
                pres.validate(a)
    return res


def check_ends(seed=0) -> CheckResult:
    res = CheckResult("ends", True)
    expected = {"line": 2, "grid2d": 1, "tree:4": "infinitely_many", "line:2,3": 2}
    for spec, want in expected.items():
        res.cases += 1
        got = count_ends(make_generator(spec), 5 if spec == "tree:4" else 6)
        if got != want:
            res.passed = False
            res.failures.append({"family": spec, "got": got, "expected": want})
    return res


def check_stallings(seed=0) -> CheckResult:
    res = CheckResult("stallings", True)
    expected = {"z2_z2.json": ("amalgam", [2, 2], 1), "z2_z3.json": ("amalgam", [2, 3], 1),
                "z4_z2_z4.json": ("amalgam", [4, 4], 2), "z.json": ("hnn", [1], 1)}
    for name, want in expected.items():
        res.cases += 1
        pres = load_presentation(name)
        desc, _ = stallings_pipeline(pres)
        got = (desc.kind, desc.vertex_orders, desc.edge_order)
        if got != want or not verify_splitting(desc, pres, 4):
            res.passed = False
            res.failures.append({"presentation": name, "got": list(got)})
    res.cases += 1
    try:
        stallings_pipeline(load_presentation("zxz.json"))
        res.passed = False
        res.failures.append({"presentation": "zxz.json", "got": "a splitting"})
    except NoSplitting:
        pass
    return res


SUITES = {
    "lemma:finitely": check_finitely,
    "lemma:intersection": check_intersection,
    "nesting:characterizations": check_nesting_forms,
    "lemma:not_nested_corner": check_not_nested_corner_suite,
    "lemma:corners_equality": check_corners_equality,
    "theorem:optimally": check_optimally,
    "tree": check_trees,
    "blocks": check_blocks,
    "lemma:normalform": check_normal_forms,
    "ends": check_ends,
    "stallings": check_stallings,
}


def _matches(tag: str, pattern: str) -> bool:
    return tag == pattern or tag.split(":")[0] == pattern


def select(only=None) -> list[str]:
    """Suite tags matching a comma-separated filter (a full tag or its prefix)."""
    if not only:
        return list(SUITES)
    wanted = [t.strip() for t in only.split(",") if t.strip()]
    unknown = [t for t in wanted if not any(_matches(s, t) for s in SUITES)]
    if unknown:
        raise ValueError(f"unknown check tag(s): {', '.join(unknown)}; known: {', '.join(SUITES)}")
    return [s for s in SUITES if any(_matches(s, t) for t in wanted)]


def run_checks(only=None, seed=0) -> list[CheckResult]:
    return [SUITES[t](seed=seed) for t in select(only)]


def check_graph(g: EndMarkedGraph) -> list[CheckResult]:
    """Cut-level suites on a user-supplied graph."""
    res = CheckResult("graph", True)
    k = kappa(g)
    cuts = minimal_cuts(g)
    for C in cuts:
        for D in cuts:
            res.cases += 1
            if not corner_profile(C, D).identity_holds(k) or not check_corner_minimality(C, D, k).passed:
                res.passed = False
                res.failures.append({"C": C.boundary_tokens(), "D": D.boundary_tokens()})
    opt = optimal_cuts(cuts)
    build_tree(CutSystem(opt))
    return [res]
