"""Infinite graph families, ball truncations and end counting.

A generator is a deterministic neighbour oracle on string tokens.  A
truncation keeps the ball of a given radius and replaces every infinite
component of its complement by a single end marker joined to the ball by
protected edges.  A complement component counts as infinite when it reaches
the shell at distance ``radius + probe_depth``; finite ones are kept as
ordinary vertices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .errors import InputError
from .graph import EndMarkedGraph, edge_token
from .groups import FreeAbelianGroup, FreeProductOfCyclics, Group, load_presentation

DEFAULT_RADIUS = 6
DEFAULT_PROBE = 2


class GraphGenerator:
    """Locally finite graph given by a base vertex and a neighbour function."""

    group: Group | None = None

    def __init__(self, base_vertex: str, neighbour_function: Callable[[str], frozenset], name="graph"):
        self.base_vertex = base_vertex
        self._nbrs = neighbour_function
        self.name = name

    def neighbours(self, v: str) -> frozenset:
        return frozenset(self._nbrs(v))

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class CayleyGenerator(GraphGenerator):
    """Cayley graph of a normal-form group; vertex tokens are normal forms."""

    def __init__(self, group: Group, name="cayley"):
        self.group = group
        self.name = name
        self._elements = {}
        self.base_vertex = self.register(group.identity)

    def register(self, nf) -> str:
        tok = self.group.token(nf)
        old = self._elements.setdefault(tok, nf)
        if old != nf:
            raise InputError(f"two normal forms share the token {tok!r}")
        return tok

    def element(self, token: str):
        """Normal form behind a vertex token seen by this generator."""
        return self._elements[token]

    def neighbours(self, v: str) -> frozenset:
        nf = self._elements[v]
        return frozenset(self.register(x) for x in self.group.neighbours(nf))


def cross_rays(k: int) -> GraphGenerator:
    """A ``k``-cycle ``v1..vk`` with a thick ray hanging off every vertex.

    Each ray ``vi = w0, w1, w2, ...`` is the cube of a path (``wj`` adjacent
    to ``wj±1, wj±2, wj±3``), so every ray is 3-edge-connected and the only
    2-edge cuts are the ones cutting the cycle.
    """
    if k < 3:
        raise InputError("cross needs at least 3 rays")

    def hub(i):
        return f"v{(i - 1) % k + 1}"

    def parse(tok):
        head, _, depth = tok.partition(".")
        i = int(head[1:])
        if not 1 <= i <= k or not head.startswith("v"):
            raise InputError(f"not a vertex of cross:{k}: {tok!r}")
        return i, int(depth) if depth else 0

    def name(i, j):
        return f"v{i}" if j == 0 else f"v{i}.{j}"

    def nbrs(tok):
        i, j = parse(tok)
        out = {name(i, j + d) for d in (1, 2, 3)}
        out |= {name(i, j - d) for d in (1, 2, 3) if j - d >= 0}
        if j == 0:
            out |= {hub(i - 1), hub(i + 1)}
        return frozenset(out)

    return GraphGenerator("v1", nbrs, name=f"cross:{k}")


def regular_tree(d: int) -> CayleyGenerator:
    """``d``-regular tree: the free group of rank ``d/2`` for even ``d``,
    the free product of ``d`` copies of ``Z2`` otherwise."""
    if d < 2:
        raise InputError("tree degree must be >= 2")
    if d % 2 == 0:
        names = [chr(ord("a") + i) for i in range(d // 2)]
        grp = FreeProductOfCyclics(names, [0] * len(names))
    else:
        names = [chr(ord("a") + i) for i in range(d)]
        grp = FreeProductOfCyclics(names, [2] * d)
    return CayleyGenerator(grp, name=f"tree:{d}")


def make_generator(spec: str) -> GraphGenerator:
    """Parse a family string (``line``, ``line:2,3``, ``ladder``, ``grid2d``,
    ``tree:4``, ``cross:4``, ``cayley:<file>``) into a generator."""
    head, _, arg = spec.partition(":")
    try:
        if head == "line":
            steps = [int(x) for x in arg.split(",")] if arg else [1]
            gens = {f"s{x}" if len(steps) > 1 else "s": [x] for x in steps}
            return CayleyGenerator(FreeAbelianGroup([0], gens), name=spec)
        if head == "ladder" and not arg:
            return CayleyGenerator(FreeAbelianGroup([0, 2], {"x": [1, 0], "y": [0, 1]}), name=spec)
        if head == "grid2d" and not arg:
            return CayleyGenerator(FreeAbelianGroup([0, 0], {"x": [1, 0], "y": [0, 1]}), name=spec)
        if head == "tree":
            return regular_tree(int(arg))
        if head == "cross":
            return cross_rays(int(arg) if arg else 4)
        if head == "cayley" and arg:
            return CayleyGenerator(load_presentation(arg), name=spec)
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad family parameters in {spec!r}: {exc}") from None
    raise InputError(f"unknown family {spec!r}")


@dataclass
class Truncation:
    generator: GraphGenerator
    radius: int
    probe_depth: int
    model: EndMarkedGraph
    marker_map: dict = field(default_factory=dict)
    distance: dict = field(default_factory=dict)
    absorbed: frozenset = frozenset()

    @property
    def ball(self) -> list[str]:
        return sorted(v for v, d in self.distance.items() if d <= self.radius)

    @property
    def marker_count(self) -> int:
        return len(self.marker_map)


def _checked_neighbours(gen, v, cache):
    if v not in cache:
        first = gen.neighbours(v)
        if gen.neighbours(v) != first:
            raise InputError(f"generator is not deterministic at {v!r}")
        if v in first:
            raise InputError(f"generator has a loop at {v!r}")
        cache[v] = first
    return cache[v]


def truncate(gen: GraphGenerator, radius: int = DEFAULT_RADIUS, probe_depth: int = DEFAULT_PROBE) -> Truncation:
    if radius < 1 or probe_depth < 1:
        raise InputError("radius and probe_depth must be >= 1")
    outer = radius + probe_depth
    cache = {}
    dist = {gen.base_vertex: 0}
    q = deque([gen.base_vertex])
    while q:
        u = q.popleft()
        if dist[u] == outer:
            continue
        for v in sorted(_checked_neighbours(gen, u, cache)):
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    for u, nb in cache.items():
        for v in nb:
            if v in cache and u not in cache[v]:
                raise InputError(f"neighbour relation not symmetric at {u!r}, {v!r}")

    ball = {v for v, d in dist.items() if d <= radius}
    annulus = sorted(v for v, d in dist.items() if d > radius)
    # components of the annulus; outer-shell vertices were not expanded, so
    # every known annulus edge has an endpoint strictly inside the shell
    parent = {v: v for v in annulus}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u in annulus:
        for v in cache.get(u, ()):
            if v in parent:
                a, b = find(u), find(v)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    groups = {}
    for v in annulus:
        groups.setdefault(find(v), set()).add(v)

    retained, absorbed = [], set()
    for members in groups.values():
        if any(dist[v] == outer for v in members):
            retained.append(members)
        else:
            absorbed |= members
    retained.sort(key=lambda m: min(m))

    model_vertices = ball | absorbed
    edges = {}
    for u in model_vertices:
        for v in cache[u]:
            if v in model_vertices:
                edges[edge_token(u, v)] = (u, v)
    markers, protected, marker_map = [], [], {}
    owner = {}
    for i, members in enumerate(retained):
        m = f"end:{i}"
        markers.append(m)
        for v in members:
            owner[v] = m
        shell = set()
        for u in ball:
            for v in cache[u]:
                if v in members:
                    shell.add(v)
                    e = edge_token(u, m)
                    edges[e] = (u, m)
        marker_map[m] = frozenset(shell)
        protected += [e for e, (u, w) in edges.items() if w == m]
    model = EndMarkedGraph(
        list(model_vertices) + markers,
        [(e, u, v) for e, (u, v) in edges.items()],
        markers,
        sorted(set(protected)),
    )
    return Truncation(gen, radius, probe_depth, model, marker_map,
                      {v: d for v, d in dist.items() if v in model_vertices}, frozenset(absorbed))


def count_ends(gen: GraphGenerator, max_radius: int = DEFAULT_RADIUS, probe_depth: int = DEFAULT_PROBE):
    """Classify the number of ends from the marker counts at two radii.

    Returns ``0``, ``1``, ``2``, ``"infinitely_many"`` or ``"unstable"``.
    """
    if max_radius < 3:
        raise InputError("max_radius must be >= 3")
    lo = truncate(gen, max_radius - 1, probe_depth).marker_count
    hi = truncate(gen, max_radius, probe_depth).marker_count
    if lo == hi and hi <= 2:
        return hi
    if 3 <= lo < hi:
        return "infinitely_many"
    return "unstable"


def algebraic_end_criterion_check(gen: CayleyGenerator, C, radius: int, letters=None) -> dict:
    """Count ``|Cs \\ C|`` inside the balls of radius ``radius - 1`` and
    ``radius`` for each generator letter ``s``.

    ``C`` is a predicate on vertex tokens or a collection of tokens.  The
    check passes when every count is the same at both radii.
    """
    if gen.group is None:
        raise InputError("the algebraic criterion needs a Cayley generator")
    member = C if callable(C) else (lambda tok, _s=frozenset(C): tok in _s)
    grp = gen.group
    letters = list(letters) if letters is not None else grp.symmetric_generators()
    counts = {s: [] for s in letters}
    for r in (radius - 1, radius):
        tr = truncate(gen, r, 1)
        ball = {v for v, d in tr.distance.items() if d <= r}
        for s in letters:
            n = 0
            for x in ball:
                if not member(x):
                    continue
                y = grp.token(grp.act(gen.element(x), s))
                if y in ball and not member(y):
                    n += 1
            counts[s].append(n)
    return {"radii": [radius - 1, radius], "counts": counts,
            "passed": all(a == b for a, b in counts.values())}
