"""Corners, nestedness, the non-nesting index and optimally nested cuts."""

from __future__ import annotations

from dataclasses import dataclass, field

from .cuts import Cut, cut_encoding, is_cut
from .errors import InvariantViolation


def _side(X) -> int:
    return X.side if isinstance(X, Cut) else X


def _full(C, D, graph=None) -> int:
    for X in (C, D):
        if isinstance(X, Cut):
            return X.graph.full
    if graph is None:
        raise TypeError("plain masks need the graph")
    return graph.full


@dataclass(frozen=True)
class Corners:
    """The four corners ``C∩D, C∩Dc, Cc∩D, Cc∩Dc`` as vertex masks."""

    cd: int
    cdc: int
    ccd: int
    ccdc: int

    OPPOSITE = {"cd": "ccdc", "ccdc": "cd", "cdc": "ccd", "ccd": "cdc"}

    def as_dict(self) -> dict:
        return {"cd": self.cd, "cdc": self.cdc, "ccd": self.ccd, "ccdc": self.ccdc}

    def opposite(self, name: str) -> int:
        return getattr(self, self.OPPOSITE[name])

    def empty(self) -> list[str]:
        return [k for k, v in self.as_dict().items() if not v]


def corners(C, D, graph=None) -> Corners:
    full = _full(C, D, graph)
    c, d = _side(C), _side(D)
    return Corners(c & d, c & ~d & full, ~c & d & full, ~c & ~d & full)


def nested_by_inclusion(C, D, graph=None) -> bool:
    """``C ⊂ D``, ``Cc ⊂ D``, ``C ⊂ Dc`` or ``Cc ⊂ Dc``."""
    full = _full(C, D, graph)
    c, d = _side(C), _side(D)
    cc, dc = full & ~c, full & ~d
    return any(x & ~y == 0 for x, y in ((c, d), (cc, d), (c, dc), (cc, dc)))


def nested_by_relation(C, D, graph=None) -> bool:
    """Disjoint, covering, or comparable."""
    full = _full(C, D, graph)
    c, d = _side(C), _side(D)
    return c & d == 0 or c | d == full or c & ~d == 0 or d & ~c == 0


def nested_by_corners(C, D, graph=None) -> bool:
    return bool(corners(C, D, graph).empty())


def is_nested(C, D, graph=None) -> bool:
    """True iff some corner of ``C`` and ``D`` is empty."""
    full = _full(C, D, graph)
    c, d = _side(C), _side(D)
    return not (c & d and c & ~d and d & ~c and full & ~(c | d))


def not_nested_set(C: Cut, all_min) -> list[Cut]:
    """``M(C)``: the members of ``all_min`` not nested with ``C``."""
    return [D for D in all_min if not is_nested(C, D)]


@dataclass
class NonNestedIndex:
    values: dict          # Cut -> m(C)
    m_star: int

    def to_dict(self) -> dict:
        rows = sorted(self.values.items(), key=lambda kv: kv[0].sort_key())
        return {"m_star": self.m_star,
                "m": [{"side": cut_encoding(c), "least_marker_side": c.contains_least_marker(),
                       "boundary": c.boundary_tokens(), "m": v} for c, v in rows]}

    def histogram(self) -> dict:
        out = {}
        for v in self.values.values():
            out[v] = out.get(v, 0) + 1
        return dict(sorted(out.items()))


def _crossing_counts(cuts) -> list[int]:
    """Number of members of ``cuts`` not nested with each member.

    Nestedness with ``D`` equals nestedness with ``Dc``, so the pair scan
    runs over one representative per complementary pair.
    """
    full = cuts[0].graph.full
    rep = {}
    for c in cuts:
        key = min(c.side, full & ~c.side)
        rep.setdefault(key, 0)
        rep[key] += 1            # 2 when the family is complement-closed
    keys = list(rep)
    hits = dict.fromkeys(keys, 0)
    for i, c in enumerate(keys):
        cc = full & ~c
        for d in keys[i + 1:]:
            if c & d and c & ~d and d & cc and cc & ~d:
                hits[c] += rep[d]
                hits[d] += rep[c]
    return [hits[min(c.side, full & ~c.side)] for c in cuts]


def m_index(all_min) -> NonNestedIndex:
    cuts = list(all_min)
    if not cuts:
        return NonNestedIndex({}, 0)
    counts = _crossing_counts(cuts)
    values = dict(zip(cuts, counts))
    return NonNestedIndex(values, min(counts))


def _assert_pairwise_nested(cuts, what):
    if not cuts or not any(_crossing_counts(cuts)):
        return
    for i, C in enumerate(cuts):
        for D in cuts[i + 1:]:
            if not is_nested(C, D):
                raise InvariantViolation(
                    f"{what} are not pairwise nested",
                    {"lemma": "optimally", "C": cut_encoding(C), "D": cut_encoding(D),
                     "C_boundary": C.boundary_tokens(), "D_boundary": D.boundary_tokens()})


def optimal_cuts(all_min, index: NonNestedIndex | None = None) -> list[Cut]:
    """Minimal cuts with ``m(C) = m*``; pairwise nestedness is always checked."""
    index = index or m_index(all_min)
    out = sorted((c for c, v in index.values.items() if v == index.m_star), key=Cut.sort_key)
    _assert_pairwise_nested(out, "optimally nested cuts")
    return out


@dataclass
class CornerInequalityReport:
    status: str
    m_values: dict = field(default_factory=dict)   # C, D, inner, outer
    passed: bool = True

    def to_dict(self):
        return {"status": self.status, "m_values": dict(self.m_values), "passed": self.passed}


def _m_of(side: int, graph, all_min) -> int:
    return sum(1 for D in all_min if not is_nested(side, D, graph))


def check_corner_inequality(C: Cut, D: Cut, all_min, index: NonNestedIndex | None = None) -> CornerInequalityReport:
    """``m(C∩D) + m(Cc∩Dc) < m(C) + m(D)`` for crossing ``C, D`` with cut corners."""
    g = C.graph
    if is_nested(C, D):
        return CornerInequalityReport("not applicable")
    k = corners(C, D)
    if not (is_cut(g, k.cd) and is_cut(g, k.ccdc)):
        return CornerInequalityReport("not applicable")
    m = index.values if index is not None else {}
    mc = m.get(C, None)
    md = m.get(D, None)
    vals = {
        "C": mc if mc is not None else _m_of(C.side, g, all_min),
        "D": md if md is not None else _m_of(D.side, g, all_min),
        "inner": _m_of(k.cd, g, all_min),
        "outer": _m_of(k.ccdc, g, all_min),
    }
    ok = vals["inner"] + vals["outer"] < vals["C"] + vals["D"]
    return CornerInequalityReport("applicable", vals, ok)


def check_not_nested_corner(cuts) -> dict:
    """Exhaustive scan of both claims about a third set and the corners of a
    crossing pair.

    Claim 1: not nested with two opposite corners implies not nested with
    both ``C`` and ``D``.  Claim 2: not nested with some corner implies not
    nested with ``C`` or with ``D``.
    """
    cuts = list(cuts)
    triples = 0
    failures = []
    for C in cuts:
        for D in cuts:
            if is_nested(C, D):
                continue
            k = corners(C, D).as_dict()
            g = C.graph
            for E in cuts:
                triples += 1
                crossing = {n: not is_nested(E.side, s, g) for n, s in k.items()}
                with_c = not is_nested(E, C)
                with_d = not is_nested(E, D)
                if (crossing["cd"] and crossing["ccdc"]) or (crossing["cdc"] and crossing["ccd"]):
                    if not (with_c and with_d):
                        failures.append(("claim1", C, D, E))
                if any(crossing.values()) and not (with_c or with_d):
                    failures.append(("claim2", C, D, E))
    return {
        "triples": triples,
        "passed": not failures,
        "failures": [{"claim": t, "C": cut_encoding(C), "D": cut_encoding(D), "E": cut_encoding(E)}
                     for t, C, D, E in failures[:10]],
    }


@dataclass
class OrbitReport:
    cuts: list
    translates: int = 0
    skipped: int = 0

    @property
    def completeness(self) -> float:
        total = self.translates + self.skipped
        return 1.0 if total == 0 else self.translates / total


def orbit_close(cuts, action) -> OrbitReport:
    """Close ``cuts`` under complement and every group element of ``action``.

    ``action`` supplies ``elements()`` and ``map_cut(g, cut)``; the latter
    returns ``None`` when the translate leaves the model, and such
    translates are counted in ``skipped``.
    """
    seen = {}
    for C in cuts:
        for X in (C, C.complement()):
            seen.setdefault(X.side, X)
    rep = OrbitReport([])
    for C in list(seen.values()):
        for g in action.elements():
            img = action.map_cut(g, C)
            if img is None:
                rep.skipped += 1
                continue
            rep.translates += 1
            for X in (img, img.complement()):
                seen.setdefault(X.side, X)
    rep.cuts = sorted(seen.values(), key=Cut.sort_key)
    return rep
