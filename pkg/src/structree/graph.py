"""Finite end-marked multigraphs and boundary operators.

Vertex sets are plain Python integers used as bitmasks: bit ``i`` is set when
the vertex with index ``i`` belongs to the set.  Vertices are indexed in
sorted token order, so bit order is canonical and independent of input order.
Every public query also accepts an iterable of vertex tokens wherever a
vertex set is expected.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import InputError


_BYTE_BITS = [tuple(j for j in range(8) if (b >> j) & 1) for b in range(256)]


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    if mask < 1 << 64:
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low
        return
    # wide masks: walk bytes, so the cost stays linear in the mask width
    for i, byte in enumerate(mask.to_bytes((mask.bit_length() + 7) // 8, "little")):
        if byte:
            base = i << 3
            for j in _BYTE_BITS[byte]:
                yield base + j


class EndMarkedGraph:
    """Immutable finite graph with end markers and protected edges.

    End markers stand in for infinite complement components of a truncated
    locally finite graph.  Edges incident to a marker must be protected;
    protected edges never belong to a separator.
    """

    def __init__(self, vertices, edges, end_markers=(), protected=(), simple=True):
        vertices = list(vertices)
        tokens = sorted(set(vertices))
        if len(tokens) != len(vertices):
            raise InputError("duplicate vertex id")
        for t in tokens:
            if not isinstance(t, str) or not t:
                raise InputError(f"vertex id must be a non-empty string, got {t!r}")
        self.vertices: tuple[str, ...] = tuple(tokens)
        self.index = {t: i for i, t in enumerate(tokens)}
        self.simple = simple

        raw = sorted(edges, key=lambda e: e[0])
        ids = [e[0] for e in raw]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate edge id")
        self.edges: tuple[str, ...] = tuple(ids)
        self.edge_index = {t: i for i, t in enumerate(ids)}
        ends = []
        seen_pairs = set()
        for eid, u, v in raw:
            if u not in self.index or v not in self.index:
                raise InputError(f"edge {eid!r} has an undeclared endpoint")
            iu, iv = self.index[u], self.index[v]
            if simple:
                if iu == iv:
                    raise InputError(f"loop {eid!r} not allowed in simple mode")
                key = (min(iu, iv), max(iu, iv))
                if key in seen_pairs:
                    raise InputError(f"parallel edge {eid!r} not allowed in simple mode")
                seen_pairs.add(key)
            ends.append((iu, iv))
        self.ends: tuple[tuple[int, int], ...] = tuple(ends)

        self.end_markers = frozenset(end_markers)
        for t in self.end_markers:
            if t not in self.index:
                raise InputError(f"end marker {t!r} is not a vertex")
        self.protected = frozenset(protected)
        for t in self.protected:
            if t not in self.edge_index:
                raise InputError(f"protected edge {t!r} is not an edge")

        n = len(tokens)
        self.full = (1 << n) - 1
        self.marker_mask = 0
        for t in self.end_markers:
            self.marker_mask |= 1 << self.index[t]
        self.protected_idx = frozenset(self.edge_index[t] for t in self.protected)

        self.incident: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.nbr_mask = [0] * n
        for ei, (u, v) in enumerate(ends):
            self.incident[u].append((v, ei))
            if u != v:
                self.incident[v].append((u, ei))
            self.nbr_mask[u] |= 1 << v
            self.nbr_mask[v] |= 1 << u
        for lst in self.incident:
            lst.sort()

        for ei, (u, v) in enumerate(ends):
            if ((self.marker_mask >> u) & 1 or (self.marker_mask >> v) & 1) and ei not in self.protected_idx:
                raise InputError(f"edge {self.edges[ei]!r} touches an end marker but is not protected")
        if n and self.component_of(0) != self.full:
            raise InputError("graph is not connected")

    # -- conversions -------------------------------------------------------

    def __repr__(self):
        return (f"EndMarkedGraph({len(self.vertices)} vertices, {len(self.edges)} edges, "
                f"{len(self.end_markers)} markers)")

    def mask(self, vs) -> int:
        """Coerce a vertex set (bitmask or iterable of tokens) to a bitmask."""
        if isinstance(vs, int):
            if vs & ~self.full:
                raise InputError("vertex mask has bits outside the graph")
            return vs
        if isinstance(vs, str):
            vs = (vs,)
        m = 0
        for t in vs:
            try:
                m |= 1 << self.index[t]
            except KeyError:
                raise InputError(f"unknown vertex {t!r}") from None
        return m

    def tokens(self, mask: int) -> list[str]:
        return [self.vertices[i] for i in iter_bits(mask)]

    def edge_tokens(self, idxs) -> frozenset[str]:
        return frozenset(self.edges[i] for i in idxs)

    def edge_mask_idx(self, es) -> frozenset[int]:
        if isinstance(es, str):
            es = (es,)
        out = set()
        for e in es:
            if isinstance(e, int):
                out.add(e)
                continue
            try:
                out.add(self.edge_index[e])
            except KeyError:
                raise InputError(f"unknown edge {e!r}") from None
        return frozenset(out)

    def complement(self, vs) -> int:
        return self.full & ~self.mask(vs)

    def endpoints(self, edge: str) -> tuple[str, str]:
        u, v = self.ends[self.edge_index[edge]]
        return self.vertices[u], self.vertices[v]

    def is_marker(self, token: str) -> bool:
        return token in self.end_markers

    # -- boundary operators ------------------------------------------------

    def boundary_idx(self, C: int) -> list[int]:
        """Edge indices of the edge boundary of mask ``C``."""
        comp = self.full & ~C
        small, other = (C, comp) if C.bit_count() <= comp.bit_count() else (comp, C)
        out = []
        for u in iter_bits(small):
            for v, ei in self.incident[u]:
                if (other >> v) & 1:
                    out.append(ei)
        out.sort()
        return out

    def delta_idx(self, C: int, D: int) -> list[int]:
        out = []
        for u in iter_bits(C):
            for v, ei in self.incident[u]:
                if (D >> v) & 1:
                    out.append(ei)
        # edges inside C ∩ D are met from both ends
        return sorted(set(out))

    def delta(self, C, D) -> frozenset[str]:
        """Edges with one endpoint in ``C`` and the other in ``D``."""
        C, D = self.mask(C), self.mask(D)
        out = set()
        for ei, (u, v) in enumerate(self.ends):
            if ((C >> u) & 1 and (D >> v) & 1) or ((C >> v) & 1 and (D >> u) & 1):
                out.add(self.edges[ei])
        return frozenset(out)

    def edge_boundary(self, C) -> frozenset[str]:
        return self.edge_tokens(self.boundary_idx(self.mask(C)))

    def neighbour_set(self, C) -> int:
        """Vertices outside ``C`` adjacent to some vertex of ``C``."""
        C = self.mask(C)
        out = 0
        for u in iter_bits(C):
            out |= self.nbr_mask[u]
        return out & ~C

    def beta(self, C) -> int:
        """Endpoints of the edge boundary, i.e. ``NC ∪ NCc``."""
        out = 0
        for ei in self.boundary_idx(self.mask(C)):
            u, v = self.ends[ei]
            out |= (1 << u) | (1 << v)
        return out

    # -- connectivity ------------------------------------------------------

    def component_of(self, start: int, allowed: int | None = None, removed=()) -> int:
        """Mask of the component of vertex index ``start`` inside ``allowed``,
        ignoring the edge indices in ``removed``."""
        if allowed is None:
            allowed = self.full
        over = {}
        for ei in removed:
            u, v = self.ends[ei]
            over[u] = over.get(u, self.nbr_mask[u]) & ~(1 << v)
            over[v] = over.get(v, self.nbr_mask[v]) & ~(1 << u)
        nbr = self.nbr_mask
        comp = frontier = 1 << start
        while frontier:
            new = 0
            for v in iter_bits(frontier):
                new |= over.get(v, nbr[v]) if over else nbr[v]
            frontier = new & allowed & ~comp
            comp |= frontier
        return comp

    def components(self, A) -> list[int]:
        """Partition of ``A`` into maximal connected subsets (masks)."""
        A = self.mask(A)
        out = []
        rest = A
        while rest:
            start = (rest & -rest).bit_length() - 1
            comp = self.component_of(start, A)
            out.append(comp)
            rest &= ~comp
        return out

    def is_connected(self, A) -> bool:
        A = self.mask(A)
        if not A:
            return False
        start = (A & -A).bit_length() - 1
        return self.component_of(start, A) == A

    def separated_by_vertices(self, S, x: str, y: str) -> bool:
        S = self.mask(S)
        ix, iy = self.index[x], self.index[y]
        if (S >> ix) & 1 or (S >> iy) & 1 or ix == iy:
            return False
        return not (self.component_of(ix, self.full & ~S) >> iy) & 1

    def separated_by_edges(self, F, A, B) -> bool:
        removed = self.edge_mask_idx(F)
        A, B = self.mask(A), self.mask(B)
        seen = 0
        for a in iter_bits(A):
            if (seen >> a) & 1:
                continue
            comp = self.component_of(a, removed=removed)
            if comp & B:
                return False
            seen |= comp
        return True

    def shortest_path(self, x: int, y: int, removed=()) -> list[int] | None:
        """Edge indices of a shortest ``x``–``y`` path avoiding ``removed``.

        Neighbours are scanned in index (= token) order, so ties are broken
        towards lexicographically smaller vertices.
        """
        removed = set(removed)
        prev = {x: None}
        q = deque([x])
        while q:
            u = q.popleft()
            if u == y:
                break
            for v, ei in self.incident[u]:
                if v not in prev and ei not in removed:
                    prev[v] = (u, ei)
                    q.append(v)
        if y not in prev:
            return None
        path = []
        cur = y
        while prev[cur] is not None:
            u, ei = prev[cur]
            path.append(ei)
            cur = u
        path.reverse()
        return path

    def distances_from(self, x: int) -> dict[int, int]:
        dist = {x: 0}
        q = deque([x])
        while q:
            u = q.popleft()
            for v, _ in self.incident[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    q.append(v)
        return dist

    def distance(self, x: str, y: str) -> int:
        try:
            ix, iy = self.index[x], self.index[y]
        except KeyError as exc:
            raise InputError(f"unknown vertex {exc.args[0]!r}") from None
        d = self.distances_from(ix).get(iy)
        if d is None:
            raise InputError(f"{x!r} and {y!r} are not connected")
        return d

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "vertices": [{"id": t, "end_marker": t in self.end_markers} for t in self.vertices],
            "edges": [
                {"id": e, "u": self.vertices[u], "v": self.vertices[v], "protected": e in self.protected}
                for e, (u, v) in zip(self.edges, self.ends)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data) -> "EndMarkedGraph":
        if not isinstance(data, dict) or set(data) != {"vertices", "edges"}:
            raise InputError("graph JSON must have exactly the keys 'vertices' and 'edges'")
        vertices, markers, edges, protected = [], [], [], []
        for rec in data["vertices"]:
            if not isinstance(rec, dict) or set(rec) != {"id", "end_marker"}:
                raise InputError(f"bad vertex record {rec!r}")
            vertices.append(rec["id"])
            if rec["end_marker"]:
                markers.append(rec["id"])
        if len(set(vertices)) != len(vertices):
            raise InputError("duplicate vertex id")
        for rec in data["edges"]:
            if not isinstance(rec, dict) or set(rec) != {"id", "u", "v", "protected"}:
                raise InputError(f"bad edge record {rec!r}")
            edges.append((rec["id"], rec["u"], rec["v"]))
            if rec["protected"]:
                protected.append(rec["id"])
        return cls(vertices, edges, markers, protected)

    @classmethod
    def from_json(cls, text: str) -> "EndMarkedGraph":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)


def edge_token(u: str, v: str) -> str:
    a, b = sorted((u, v))
    return f"{a}|{b}"


def graph_from_edges(pairs, end_markers=(), protected_pairs=None) -> EndMarkedGraph:
    """Build a simple graph from vertex-token pairs.

    Edge ids are derived from the sorted endpoint tokens.  Edges touching a
    marker are protected automatically.
    """
    markers = set(end_markers)
    vertices, edges, prot = set(), [], []
    for u, v in pairs:
        vertices.update((u, v))
        e = edge_token(u, v)
        edges.append((e, u, v))
        if u in markers or v in markers:
            prot.append(e)
    if protected_pairs:
        prot.extend(edge_token(u, v) for u, v in protected_pairs)
    return EndMarkedGraph(vertices, edges, markers, prot)


def barycentric_subdivision(T: EndMarkedGraph):
    """Replace every edge by a path of length two.

    Returns the subdivided graph and a map from each vertex token to
    ``("vertex", token)`` or ``("edge", edge_token)``.
    """
    origin = {t: ("vertex", t) for t in T.vertices}
    vertices = list(T.vertices)
    edges = []
    protected = []
    for e, (u, v) in zip(T.edges, T.ends):
        mid = f"<{e}>"
        if mid in origin:
            raise InputError(f"subdivision vertex name {mid!r} collides")
        origin[mid] = ("edge", e)
        vertices.append(mid)
        a, b = T.vertices[u], T.vertices[v]
        edges.append((f"{e}/0", a, mid))
        edges.append((f"{e}/1", mid, b))
        if e in T.protected:
            protected += [f"{e}/0", f"{e}/1"]
    return EndMarkedGraph(vertices, edges, T.end_markers, protected), origin


@dataclass
class QuotientMultigraph:
    """Orbit multigraph with origin/terminus maps ``alpha`` and ``omega``."""

    vertices: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    alpha: dict = field(default_factory=dict)
    omega: dict = field(default_factory=dict)

    def __post_init__(self):
        for e in self.edges:
            if e not in self.alpha or e not in self.omega:
                raise InputError(f"quotient edge {e!r} lacks an origin or terminus")

    def classify(self) -> str:
        """``"loop"``, ``"segment"`` or ``"other"``."""
        if len(self.edges) == 1:
            e = self.edges[0]
            if len(self.vertices) == 1 and self.alpha[e] == self.omega[e]:
                return "loop"
            if len(self.vertices) == 2 and self.alpha[e] != self.omega[e]:
                return "segment"
        return "other"
