"""Separators, cuts, kappa and the corner identity.

A ``k``-separator is a ``k``-element edge boundary whose two sides are both
connected.  Separators containing a given edge are enumerated by induction
on ``k``: a single edge is a 1-separator iff it is a bridge; for larger
``k`` we delete ``e``, walk a shortest path between its endpoints, and every
larger separator through ``e`` must also cut some edge ``e'`` of that path,
so we recurse on ``(X - e, e', k - 1)``.

Cut mode layers the end-marker requirement on top: both sides must contain a
marker and no boundary edge may be protected.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .errors import BudgetExhausted, InputError, NoCutFound
from .graph import EndMarkedGraph

DEFAULT_KMAX = 8
DEFAULT_BUDGET = 10**6


class Cut:
    """Oriented cut: a side mask with a cached edge boundary."""

    __slots__ = ("graph", "side", "_boundary")

    def __init__(self, graph: EndMarkedGraph, side):
        self.graph = graph
        self.side = graph.mask(side)
        self._boundary = None

    @property
    def boundary(self) -> tuple[int, ...]:
        if self._boundary is None:
            self._boundary = tuple(self.graph.boundary_idx(self.side))
        return self._boundary

    def complement(self) -> "Cut":
        c = Cut(self.graph, self.graph.full & ~self.side)
        c._boundary = self._boundary
        return c

    def tokens(self) -> list[str]:
        return self.graph.tokens(self.side)

    def boundary_tokens(self) -> list[str]:
        return sorted(self.graph.edges[i] for i in self.boundary)

    def contains_least_marker(self) -> bool:
        g = self.graph
        least = min(g.end_markers)
        return bool((self.side >> g.index[least]) & 1)

    def sort_key(self):
        """Canonical order: boundary encoding, then the least-marker side first."""
        return (self.boundary_tokens(), not self.contains_least_marker())

    def __eq__(self, other):
        return isinstance(other, Cut) and self.side == other.side and self.graph is other.graph

    def __hash__(self):
        return hash(self.side)

    def __repr__(self):
        toks = self.tokens()
        shown = ",".join(toks[:6]) + (",..." if len(toks) > 6 else "")
        return f"Cut({{{shown}}} |δ|={len(self.boundary)})"


def separator_encoding(graph: EndMarkedGraph, edges) -> list[str]:
    return sorted(graph.edges[i] if isinstance(i, int) else i for i in edges)


def cut_encoding(cut: Cut) -> list[str]:
    """Sorted vertex tokens of the side holding the least end marker."""
    return cut.tokens() if cut.contains_least_marker() else cut.complement().tokens()


@dataclass(frozen=True)
class Separator:
    edges: frozenset  # edge indices
    side: int         # connected witness side

    def encoding(self, graph) -> list[str]:
        return separator_encoding(graph, self.edges)


def is_cut(graph: EndMarkedGraph, C) -> bool:
    C = graph.mask(C)
    comp = graph.full & ~C
    if not C or not comp:
        return False
    if not (C & graph.marker_mask) or not (comp & graph.marker_mask):
        return False
    if any(ei in graph.protected_idx for ei in graph.boundary_idx(C)):
        return False
    return graph.is_connected(C) and graph.is_connected(comp)


class _Enumerator:
    def __init__(self, graph: EndMarkedGraph, budget: int):
        self.g = graph
        self.budget = budget
        self.nodes = 0

    def run(self, removed: frozenset, e: int, k: int, forbidden: frozenset):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExhausted(self.budget)
        g = self.g
        x, y = g.ends[e]
        without = removed | {e}
        comp = g.component_of(x, removed=without)
        crossed = not (comp >> y) & 1
        if k == 1:
            return [(frozenset((e,)), comp)] if crossed else []
        if crossed:
            # a bridge is the whole boundary of its (connected) sides
            return []
        path = g.shortest_path(x, y, without)
        out = []
        skip = set(forbidden)
        for e2 in path:
            if e2 in skip or e2 in g.protected_idx:
                continue
            for F, side in self.run(without, e2, k - 1, frozenset(skip)):
                if ((side >> x) & 1) != ((side >> y) & 1):
                    out.append((F | {e}, side))
            # every separator through e2 has now been listed
            skip.add(e2)
        return out


def _edge_idx(graph, e) -> int:
    if isinstance(e, int):
        return e
    try:
        return graph.edge_index[e]
    except KeyError:
        raise InputError(f"unknown edge {e!r}") from None


def enumerate_separators_containing(graph: EndMarkedGraph, e, k: int, budget: int = DEFAULT_BUDGET,
                                    forbidden=()) -> list[Separator]:
    """All ``k``-separators of ``graph`` that contain edge ``e``.

    Separators through an edge of ``forbidden`` are left out (used to list
    each separator once when sweeping over all edges).
    """
    if k < 1:
        raise InputError("k must be >= 1")
    ei = _edge_idx(graph, e)
    if ei in graph.protected_idx:
        raise InputError(f"edge {graph.edges[ei]!r} is protected")
    if k > len(graph.edges):
        return []
    en = _Enumerator(graph, budget)
    found = {}
    for F, side in en.run(frozenset(), ei, k, frozenset(forbidden)):
        found.setdefault(F, side)
    return sorted((Separator(F, side) for F, side in found.items()),
                  key=lambda s: separator_encoding(graph, s.edges))


def all_separators(graph: EndMarkedGraph, k: int, budget: int = DEFAULT_BUDGET) -> list[Separator]:
    """Every ``k``-separator of the graph, each listed once."""
    out = []
    done = []
    for ei in range(len(graph.edges)):
        if ei in graph.protected_idx:
            continue
        out += enumerate_separators_containing(graph, ei, k, budget, forbidden=done)
        done.append(ei)
    return out


def _find_minimal(graph, k_max, budget):
    cache = graph.__dict__.setdefault("_mincut_cache", {})
    key = (k_max, budget)
    if key in cache:
        return cache[key]
    if len(graph.end_markers) < 2:
        result = None
    else:
        result = None
        for k in range(1, k_max + 1):
            cuts = []
            for sep in all_separators(graph, k, budget):
                if is_cut(graph, sep.side):
                    c = Cut(graph, sep.side)
                    cuts += [c, c.complement()]
            if cuts:
                result = (k, sorted(cuts, key=Cut.sort_key))
                break
    cache[key] = result
    return result


def kappa(graph: EndMarkedGraph, k_max: int = DEFAULT_KMAX, budget: int = DEFAULT_BUDGET) -> int:
    """Smallest boundary size of a cut; raises :class:`NoCutFound`."""
    res = _find_minimal(graph, k_max, budget)
    if res is None:
        raise NoCutFound(k_max)
    return res[0]


def minimal_cuts(graph: EndMarkedGraph, k_max: int = DEFAULT_KMAX, budget: int = DEFAULT_BUDGET) -> list[Cut]:
    """All oriented cuts of boundary size kappa, in canonical order."""
    res = _find_minimal(graph, k_max, budget)
    if res is None:
        raise NoCutFound(k_max)
    return list(res[1])


@dataclass(frozen=True)
class CornerProfile:
    a: int
    b: int
    c: int
    d: int
    e: int
    f: int

    def identity_holds(self, kappa: int) -> bool:
        return 2 * kappa == self.a + self.b + self.c + self.d + 2 * self.e + 2 * self.f


# corner label of an endpoint: (in C, in D)
_PAIRS = {
    frozenset({(1, 1), (0, 1)}): "a",
    frozenset({(1, 1), (1, 0)}): "b",
    frozenset({(1, 0), (0, 0)}): "c",
    frozenset({(0, 1), (0, 0)}): "d",
    frozenset({(1, 1), (0, 0)}): "e",
    frozenset({(1, 0), (0, 1)}): "f",
}


def corner_profile(C: Cut, D: Cut) -> CornerProfile:
    """Edge counts between the four corners of ``C`` and ``D``.

    Any edge joining two different corners lies in ``δC ∪ δD``, so only
    those edges are inspected.
    """
    g = C.graph
    counts = dict.fromkeys("abcdef", 0)
    for ei in set(C.boundary) | set(D.boundary):
        u, v = g.ends[ei]
        cu = ((C.side >> u) & 1, (D.side >> u) & 1)
        cv = ((C.side >> v) & 1, (D.side >> v) & 1)
        counts[_PAIRS[frozenset({cu, cv})]] += 1
    return CornerProfile(**counts)


@dataclass
class CornerReport:
    status: str                 # "applicable" or "not applicable"
    profile: CornerProfile
    kappa: int
    corner_sizes: tuple = ()    # |δ(C∩D)|, |δ(Cc∩Dc)|
    passed: bool = True

    def to_dict(self):
        d = asdict(self)
        d["corner_sizes"] = list(self.corner_sizes)
        return d


def check_corner_minimality(C: Cut, D: Cut, kappa_value: int | None = None) -> CornerReport:
    """If ``C∩D`` and ``Cc∩Dc`` are cuts, both must be minimal and ``f = 0``."""
    g = C.graph
    if kappa_value is None:
        kappa_value = kappa(g)
    prof = corner_profile(C, D)
    if len(C.boundary) != kappa_value or len(D.boundary) != kappa_value:
        return CornerReport("not applicable", prof, kappa_value)
    inner = C.side & D.side
    outer = g.full & ~C.side & ~D.side
    if not (is_cut(g, inner) and is_cut(g, outer)):
        return CornerReport("not applicable", prof, kappa_value)
    sizes = (len(g.boundary_idx(inner)), len(g.boundary_idx(outer)))
    ok = sizes == (kappa_value, kappa_value) and prof.f == 0
    return CornerReport("applicable", prof, kappa_value, sizes, ok)
