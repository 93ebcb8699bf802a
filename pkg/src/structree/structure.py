"""Nested cut systems, their equivalence classes and the structure tree.

The tree has one vertex per equivalence class of cuts and one edge per
complementary pair ``{C, Cc}``, joining ``[C]`` and ``[Cc]``.  Two cuts are
equivalent when they are equal, or when ``Cc`` is a proper subset of ``D``
with no member of the system strictly in between.

Blocks (maximal inseparable vertex sets) are computed too, as an
experimental cross-check; adjacency-by-intersection of blocks is not used
for the tree because it produces triangles on regular trees.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .cuts import Cut, cut_encoding
from .errors import InvariantViolation
from .graph import iter_bits
from .nesting import is_nested


def _proper_subset(a: int, b: int) -> bool:
    return a != b and a & ~b == 0


class CutSystem:
    """Complement-closed, pairwise nested family of oriented cuts."""

    def __init__(self, cuts, check: bool = True):
        cuts = list(cuts)
        if not cuts:
            raise InvariantViolation("empty cut system")
        self.graph = cuts[0].graph
        by_side = {}
        for c in cuts:
            if c.graph is not self.graph:
                raise InvariantViolation("cuts from different graphs")
            by_side.setdefault(c.side, c)
        self.cuts = sorted(by_side.values(), key=Cut.sort_key)
        self.by_side = {c.side: c for c in self.cuts}
        self.ids = {c.side: f"c{i}" for i, c in enumerate(self.cuts)}
        if check:
            self._check()

    def _check(self):
        full = self.graph.full
        for c in self.cuts:
            if full & ~c.side not in self.by_side:
                raise InvariantViolation("cut system is not closed under complement",
                                         {"missing_complement_of": cut_encoding(c)})
        for i, C in enumerate(self.cuts):
            for D in self.cuts[i + 1:]:
                if not is_nested(C, D):
                    raise InvariantViolation("nesting violation in cut system",
                                             {"C": cut_encoding(C), "D": cut_encoding(D),
                                              "C_boundary": C.boundary_tokens(),
                                              "D_boundary": D.boundary_tokens()})

    def __len__(self):
        return len(self.cuts)

    def __iter__(self):
        return iter(self.cuts)

    def __contains__(self, c):
        return c.side in self.by_side

    def complement(self, c: Cut) -> Cut:
        return self.by_side[self.graph.full & ~c.side]

    def cut_id(self, c: Cut) -> str:
        return self.ids[c.side]


def equivalent(C: Cut, D: Cut, sys: CutSystem) -> bool:
    if C.side == D.side:
        return True
    full = sys.graph.full
    cc = full & ~C.side
    if not _proper_subset(cc, D.side):
        return False
    return not any(_proper_subset(cc, E.side) and _proper_subset(E.side, D.side) for E in sys)


def _successors(sys: CutSystem) -> dict:
    """For each cut ``C`` the cuts ``D`` with ``C ~ D, C != D``."""
    full = sys.graph.full
    sides = [c.side for c in sys.cuts]
    out = {}
    for c in sides:
        cc = full & ~c
        above = sorted((d for d in sides if _proper_subset(cc, d)), key=int.bit_count)
        minimal = []
        for d in above:
            if not any(m & ~d == 0 for m in minimal):
                minimal.append(d)
        out[c] = minimal
    return out


def classes(sys: CutSystem) -> list[list[Cut]]:
    """Partition of the system into equivalence classes, canonically ordered.

    Transitivity is checked on the result: every two members of a class
    must be directly related.
    """
    succ = _successors(sys)
    parent = {c.side: c.side for c in sys.cuts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c, ds in succ.items():
        for d in ds:
            a, b = find(c), find(d)
            if a != b:
                parent[b] = a
    groups = {}
    for c in sys.cuts:
        groups.setdefault(find(c.side), []).append(c)
    out = sorted(groups.values(), key=lambda g: g[0].sort_key())
    for g in out:
        related = {c.side: set(succ[c.side]) for c in g}
        for i, C in enumerate(g):
            for D in g[i + 1:]:
                if D.side not in related[C.side]:
                    # find a witness path C ~ E ~ D to report
                    mid = next((E for E in g if E.side in related[C.side] and D.side in related[E.side]), None)
                    raise InvariantViolation("equivalence of cuts is not transitive", {
                        "C": cut_encoding(C), "D": cut_encoding(D),
                        "E": cut_encoding(mid) if mid is not None else None})
    return out


@dataclass
class StructureTree:
    system: CutSystem
    classes: list                       # list[list[Cut]]
    class_of: dict                      # cut side -> class index
    edges: list                         # (i, j, cut) with cut the least-marker side
    payload: dict = field(default_factory=dict)

    @property
    def class_ids(self) -> list[str]:
        return [f"t{i}" for i in range(len(self.classes))]

    def neighbours(self, i: int) -> list[int]:
        out = []
        for a, b, _ in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)

    def adjacency(self) -> dict:
        adj = {i: set() for i in range(len(self.classes))}
        for a, b, _ in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def class_index(self, cut: Cut) -> int:
        return self.class_of[cut.side]

    def locate_vertex(self, x: str):
        return locate_vertex(x, self)

    def to_dict(self) -> dict:
        ids = self.system.ids
        return {
            "classes": [{"id": f"t{i}", "cuts": [ids[c.side] for c in cl],
                         "members": [{"id": ids[c.side], "side": c.tokens(),
                                      "boundary": c.boundary_tokens()} for c in cl]}
                        for i, cl in enumerate(self.classes)],
            "edges": [{"source": f"t{a}", "target": f"t{b}", "cut": ids[c.side],
                       "encoding": cut_encoding(c)} for a, b, c in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_dot(self) -> str:
        ids = self.system.ids
        lines = ["graph T {"]
        for i in range(len(self.classes)):
            lines.append(f'  "t{i}";')
        for a, b, c in self.edges:
            lines.append(f'  "t{a}" -- "t{b}" [label="{ids[c.side]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _is_tree(n: int, edges) -> bool:
    if len(edges) != n - 1:
        return False
    adj = {i: [] for i in range(n)}
    for a, b, _ in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    q = deque([0])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                q.append(v)
    return len(seen) == n


def build_tree(sys: CutSystem) -> StructureTree:
    cls = classes(sys)
    class_of = {c.side: i for i, cl in enumerate(cls) for c in cl}
    edges = []
    for c in sys.cuts:
        if not c.contains_least_marker():
            continue
        cc = sys.complement(c)
        a, b = class_of[c.side], class_of[cc.side]
        if a == b:
            raise InvariantViolation("a cut and its complement are equivalent",
                                     {"cut": cut_encoding(c)})
        edges.append((a, b, c))
    if not _is_tree(len(cls), edges):
        raise InvariantViolation("class graph is not a tree",
                                 {"classes": len(cls), "edges": len(edges)})
    return StructureTree(sys, cls, class_of, edges)


def locate_vertex(x: str, tree: StructureTree):
    """Index of the unique class whose cuts all contain ``x``, or ``"unresolved"``."""
    g = tree.system.graph
    bit = 1 << g.index[x]
    hits = [i for i, cl in enumerate(tree.classes) if all(c.side & bit for c in cl)]
    if len(hits) > 1:
        raise InvariantViolation("vertex lies in several classes",
                                 {"vertex": x, "classes": [f"t{i}" for i in hits]})
    return hits[0] if hits else "unresolved"


def vertex_map(tree: StructureTree, vertices=None) -> dict:
    g = tree.system.graph
    vs = vertices if vertices is not None else [v for v in g.vertices if v not in g.end_markers]
    return {v: locate_vertex(v, tree) for v in vs}


def compare_trees(small: StructureTree, large: StructureTree, vertices) -> dict:
    """Check that ``vertices`` locate to isomorphic subtrees in both trees.

    The map ``loc_small(x) -> loc_large(x)`` must be well defined and
    injective on the located classes and preserve adjacency both ways.
    """
    a = vertex_map(small, vertices)
    b = vertex_map(large, vertices)
    pairs = {}
    ok = True
    for x in vertices:
        if a[x] == "unresolved" or b[x] == "unresolved":
            continue
        if pairs.setdefault(a[x], b[x]) != b[x]:
            ok = False
    if len(set(pairs.values())) != len(pairs):
        ok = False
    adj_a, adj_b = small.adjacency(), large.adjacency()
    for u, fu in pairs.items():
        for v, fv in pairs.items():
            if (v in adj_a[u]) != (fv in adj_b[fu]):
                ok = False
    return {"matched_classes": len(pairs), "passed": ok}


# -- experimental: blocks --------------------------------------------------

def _halves(sys: CutSystem) -> list[tuple[int, int]]:
    """``(C ∪ NC, Cc ∪ NCc)`` for every cut of the system."""
    g = sys.graph
    out = []
    for c in sys.cuts:
        cc = g.full & ~c.side
        out.append((c.side | g.neighbour_set(c.side), cc | g.neighbour_set(cc)))
    return out


def _split_maps(sys: CutSystem) -> list[tuple[int, list[int]]]:
    """For every cut: ``βC`` and the components of ``X - βC``."""
    g = sys.graph
    out = []
    for c in sys.cuts:
        b = g.beta(c.side)
        out.append((b, g.components(g.full & ~b)))
    return out


BLOCK_MODES = ("set", "separation")


class _Inseparability:
    """Inseparability test for blocks.

    ``"set"``: every ``C`` has ``B ⊂ C ∪ NC`` or ``B ⊂ Cc ∪ NCc``.
    ``"separation"``: additionally no ``βC`` separates two vertices of
    ``B``; end markers are left out in this mode, since removing a vertex
    next to several markers would separate them from each other.

    Either way each cut contributes a short list of masks and ``B`` is
    inseparable iff it fits inside one mask of every list.
    """

    def __init__(self, sys: CutSystem, mode: str = "set"):
        if mode not in BLOCK_MODES:
            raise ValueError(f"unknown block mode {mode!r}")
        self.g = sys.graph
        self.mode = mode
        self.ground = self.g.full if mode == "set" else self.g.full & ~self.g.marker_mask
        self.halves = _halves(sys)
        self.options = [[p & self.ground, q & self.ground] for p, q in self.halves]
        if mode == "separation":
            for (beta, comps), opts in zip(_split_maps(sys), self.options):
                opts[:] = [o & (beta | k) for o in opts for k in comps]

    def ok(self, B: int) -> bool:
        return bool(B) and all(any(B & ~o == 0 for o in opts) for opts in self.options)

    def maximal_containing(self, B: int) -> list[int]:
        """Maximal inseparable supersets of ``B`` (which must be inseparable)."""
        leaves = []
        stack = [(self.ground, 0)]
        n = len(self.options)
        while stack:
            S, i = stack.pop()
            while i < n:
                fits = [S & o for o in self.options[i] if B & ~o == 0]
                if any(f == S for f in fits):
                    i += 1
                    continue
                stack.extend((f, i + 1) for f in fits[1:])
                S = fits[0]
                i += 1
            leaves.append(S)
        return _maximal(leaves)


def _maximal(masks) -> list[int]:
    out = []
    for m in sorted(set(masks), key=int.bit_count, reverse=True):
        if not any(m & ~o == 0 for o in out):
            out.append(m)
    return out


def is_inseparable(B, sys: CutSystem, mode: str = "set") -> bool:
    return _Inseparability(sys, mode).ok(sys.graph.mask(B))


def blocks(sys: CutSystem, mode: str = "set") -> list[int]:
    """All maximal inseparable sets.

    Every edge inside the ground set is inseparable; for each one we branch
    over the masks each cut allows and keep the maximal intersections.  The
    union over all edges, reduced to its maximal members, is the block list.
    Inseparability passes to subsets, so maximality is then confirmed by
    trying every single-vertex extension.
    """
    g = sys.graph
    ins = _Inseparability(sys, mode)
    found = []
    for u, v in g.ends:
        B = (1 << u) | (1 << v)
        if B & ~ins.ground:
            continue
        if not ins.ok(B):
            raise InvariantViolation("an edge is separable", {"edge": g.tokens(B)})
        found += ins.maximal_containing(B)
    out = sorted(_maximal(found), key=lambda m: g.tokens(m))
    for B in out:
        for z in iter_bits(ins.ground & ~B):
            if ins.ok(B | (1 << z)):
                raise InvariantViolation("block is not maximal", {"block": g.tokens(B)})
    return out


def _c_of_block(B: int, halves) -> list[int]:
    """Indices of cuts ``C`` minimal for ``B ⊂ C ∪ NC``."""
    cand = [i for i, (p, _) in enumerate(halves) if B & ~p == 0]
    out = []
    for i in cand:
        pi = halves[i][0]
        if not any(halves[j][0] != pi and halves[j][0] & ~pi == 0 for j in cand):
            out.append(i)
    return out


def check_block_lemma(sys: CutSystem, block_list=None, mode: str = "set") -> dict:
    """Report on the block lemma: ``βC`` inseparability, uniqueness of the
    block ``B_C`` with ``C ∈ C(B_C)``, and both halves of
    ``∪ βD ⊂ B_C = ∩ (D ∪ ND)`` over ``D ∈ C(B_C)``."""
    g = sys.graph
    ins = _Inseparability(sys, mode)
    halves = ins.halves
    bl = block_list if block_list is not None else blocks(sys, mode)
    beta = [g.beta(c.side) & ins.ground for c in sys.cuts]
    beta_ok = all(ins.ok(b) for b in beta)

    owners = {i: [] for i in range(len(sys.cuts))}
    cb = {}
    for k, B in enumerate(bl):
        cb[k] = _c_of_block(B, halves)
        for i in cb[k]:
            owners[i].append(k)
    unique_fail = [sys.ids[sys.cuts[i].side] for i, ks in owners.items() if len(ks) != 1]

    union_fail, inter_fail = [], []
    for k, B in enumerate(bl):
        members = cb[k]
        if not members or not any(k in owners[i] and len(owners[i]) == 1 for i in members):
            continue
        union = 0
        inter = ins.ground
        for i in members:
            union |= beta[i]
            inter &= halves[i][0]
        if union & ~B:
            union_fail.append(g.tokens(B))
        if inter != B:
            inter_fail.append(g.tokens(B))
    return {
        "mode": mode,
        "blocks": len(bl),
        "beta_inseparable": beta_ok,
        "unique_block_failures": unique_fail,
        "union_bound_failures": union_fail,
        "intersection_failures": inter_fail,
        "passed": beta_ok and not unique_fail and not union_fail and not inter_fail,
    }


def block_intersection_graph(sys: CutSystem, block_list=None, mode: str = "set") -> dict:
    """The adjacency-by-intersection graph on blocks and whether it is a tree."""
    bl = block_list if block_list is not None else blocks(sys, mode)
    edges = [(i, j, None) for i in range(len(bl)) for j in range(i + 1, len(bl)) if bl[i] & bl[j]]
    adj = {i: set() for i in range(len(bl))}
    for i, j, _ in edges:
        adj[i].add(j)
        adj[j].add(i)
    triangles = sum(1 for i, j, _ in edges for k in adj[i] & adj[j] if k > j)
    return {"blocks": len(bl), "edges": len(edges), "triangles": triangles,
            "is_tree": bool(bl) and _is_tree(len(bl), edges)}


def block_sizes(sys: CutSystem, block_list=None, mode: str = "set") -> dict:
    bl = block_list if block_list is not None else blocks(sys, mode)
    out = {}
    for B in bl:
        n = sum(1 for _ in iter_bits(B))
        out[n] = out.get(n, 0) + 1
    return dict(sorted(out.items()))
