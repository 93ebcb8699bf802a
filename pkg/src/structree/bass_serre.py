"""Group actions on structure trees and the Stallings splitting pipeline.

A Cayley group acts on its graph by left multiplication.  On a truncation
the action is partial: translates that leave the ball are undefined, and
every such miss is counted rather than dropped silently.  Stabilizers are
found by candidate search: an element moving ``x0`` into a finite set ``S``
is ``y * x0^-1`` for some ``y`` in ``S``, and freeness makes that list
exhaustive.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .cuts import Cut, cut_encoding, is_cut, kappa, minimal_cuts
from .errors import IncreaseRadius, InputError, InvariantViolation, NoCutFound, NoSplitting, Unverifiable
from .families import CayleyGenerator, count_ends, truncate
from .graph import QuotientMultigraph, barycentric_subdivision, edge_token, graph_from_edges, iter_bits
from .groups import (IDENTITY, MAX_TABLE, AmalgamPresentation, FiniteGroupTable, Group,
                     HNNPresentation, PresentationError)
from .nesting import m_index, optimal_cuts, orbit_close
from .structure import CutSystem, StructureTree, build_tree


class GroupAction:
    """Left multiplication of a Cayley generator's group on a truncation."""

    def __init__(self, gen: CayleyGenerator, trunc):
        if gen.group is None:
            raise InputError("group actions need a Cayley generator")
        self.gen = gen
        self.group: Group = gen.group
        self.trunc = trunc
        self.model = trunc.model
        self._points = {}
        self._cuts = {}

    def token(self, g) -> str:
        return self.group.token(g)

    def element(self, tok: str):
        return self.gen.element(tok)

    def elements(self) -> list:
        """Group elements sitting at non-marker vertices of the model."""
        m = self.model
        return [self.element(v) for v in m.vertices if v not in m.end_markers]

    def apply(self, g, tok: str):
        """``g * tok`` as a model vertex token, or ``None`` off the model."""
        key = (self.token(g), tok)
        if key not in self._points:
            m = self.model
            img = None
            if tok not in m.end_markers:
                y = self.group.token(self.group.multiply(g, self.element(tok)))
                if y in m.index and y not in m.end_markers:
                    img = y
            self._points[key] = img
        return self._points[key]

    def apply_set(self, g, mask: int):
        m = self.model
        out = 0
        for i in iter_bits(mask):
            y = self.apply(g, m.vertices[i])
            if y is None:
                return None
            out |= 1 << m.index[y]
        return out

    def map_cut(self, g, cut: Cut):
        """``g(C)`` as a cut of the model, or ``None`` if it leaves the model."""
        key = (self.token(g), cut.side)
        if key in self._cuts:
            return self._cuts[key]
        m = self.model
        img = None
        F = []
        start = None
        for ei in cut.boundary:
            u, v = (m.vertices[i] for i in m.ends[ei])
            gu, gv = self.apply(g, u), self.apply(g, v)
            if gu is None or gv is None:
                F = None
                break
            e = m.edge_index.get(edge_token(gu, gv))
            if e is None or e in m.protected_idx:
                F = None
                break
            F.append(e)
            if start is None:
                start = m.index[gu] if (cut.side >> m.ends[ei][0]) & 1 else m.index[gv]
        if F is not None and start is not None:
            side = m.component_of(start, removed=F)
            if sorted(m.boundary_idx(side)) == sorted(F) and is_cut(m, side):
                img = Cut(m, side)
        self._cuts[key] = img
        return img


@dataclass
class Stabilizer:
    elements: list                          # normal forms, identity first
    tokens: list
    partial: list = field(default_factory=list)   # tokens of candidates with undefined images
    closed: bool = True

    @property
    def order(self) -> int:
        return len(self.elements)

    def to_dict(self) -> dict:
        return {"elements": list(self.tokens), "order": self.order,
                "partial_candidates": list(self.partial), "closed": self.closed}


def _sorted_elements(action, elems):
    uniq = {action.token(g): g for g in elems}
    keys = sorted(uniq, key=lambda t: (t != IDENTITY, len(t), t))
    return [uniq[k] for k in keys], keys


def _closed(action, elems) -> bool:
    grp = action.group
    toks = {action.token(g) for g in elems}
    for g in elems:
        if action.token(grp.inverse(g)) not in toks:
            return False
        for h in elems:
            if action.token(grp.multiply(g, h)) not in toks:
                return False
    return True


def _candidates(action, S: int, anchor: int | None = None):
    """``y * x0^-1`` for ``y`` in ``S``; ``x0`` is the vertex of ``S`` nearest
    the base (or ``anchor`` when given)."""
    m = action.model
    grp = action.group
    pts = [i for i in iter_bits(S) if m.vertices[i] not in m.end_markers]
    if not pts:
        return []
    if anchor is None:
        dist = action.trunc.distance
        anchor = min(pts, key=lambda i: (dist.get(m.vertices[i], 0), m.vertices[i]))
    x0_inv = grp.inverse(action.element(m.vertices[anchor]))
    return [grp.multiply(action.element(m.vertices[i]), x0_inv) for i in pts]


def _check_free(action, g, S: int):
    m = action.model
    if action.token(g) == action.token(action.group.identity):
        return
    for i in iter_bits(S):
        v = m.vertices[i]
        if v not in m.end_markers and action.apply(g, v) == v:
            raise InvariantViolation("a non-identity element fixes a vertex",
                                     {"element": action.token(g), "vertex": v})


def setwise_stabilizer(S, action: GroupAction) -> Stabilizer:
    """All ``g`` with ``g(S) = S`` (``S`` a vertex mask or token collection)."""
    m = action.model
    S = m.mask(S)
    good, partial = [], []
    for g in _candidates(action, S):
        _check_free(action, g, S)
        img = action.apply_set(g, S & ~m.marker_mask)
        if img is None:
            partial.append(action.token(g))
        elif img == S & ~m.marker_mask:
            good.append(g)
    elems, toks = _sorted_elements(action, good)
    st = Stabilizer(elems, toks, sorted(partial), _closed(action, elems))
    if not st.closed:
        raise InvariantViolation("setwise stabilizer is not a group", {"elements": toks})
    return st


def cut_stabilizer(cut: Cut, action: GroupAction, swap: bool = False) -> Stabilizer:
    """Elements with ``g(C) = C`` (or ``g(C) ∈ {C, Cc}`` when ``swap``)."""
    m = action.model
    base = setwise_stabilizer(m.beta(cut.side), action)
    targets = {cut.side, m.full & ~cut.side} if swap else {cut.side}
    good = [g for g in base.elements
            if (img := action.map_cut(g, cut)) is not None and img.side in targets]
    elems, toks = _sorted_elements(action, good)
    return Stabilizer(elems, toks, base.partial, _closed(action, elems))


@dataclass
class TreeAction:
    """Partial action of a group on the classes of a structure tree."""

    action: GroupAction
    tree: StructureTree
    generator_maps: dict = field(default_factory=dict)   # letter -> {class: class}
    undefined: int = 0

    def class_image(self, g, i: int):
        """Index of ``g[C]`` for class ``i``, or ``None`` if no member maps
        into the system.  Members mapping to different classes are an error."""
        sys = self.tree.system
        seen = set()
        for c in self.tree.classes[i]:
            img = self.action.map_cut(g, c)
            if img is not None and img.side in sys.by_side:
                seen.add(self.tree.class_of[img.side])
        if len(seen) > 1:
            raise InvariantViolation("class members map to different classes",
                                     {"element": self.action.token(g), "class": f"t{i}"})
        return seen.pop() if seen else None

    def cut_image(self, g, c: Cut):
        img = self.action.map_cut(g, c)
        if img is None or img.side not in self.tree.system.by_side:
            return None
        return self.tree.system.by_side[img.side]


def induced_tree_action(action: GroupAction, tree: StructureTree) -> TreeAction:
    ta = TreeAction(action, tree)
    grp = action.group
    for s in grp.symmetric_generators():
        g = grp.normalize([s])
        mp = {}
        for i in range(len(tree.classes)):
            j = ta.class_image(g, i)
            if j is None:
                ta.undefined += 1
            else:
                mp[i] = j
        ta.generator_maps[s] = mp
    return ta


@dataclass
class EdgeInversion:
    element: object
    token: str
    cut: Cut
    edge: tuple                  # (class of C, class of Cc)

    def to_dict(self):
        return {"element": self.token, "cut": cut_encoding(self.cut),
                "edge": [f"t{self.edge[0]}", f"t{self.edge[1]}"]}


def find_inversion(cut: Cut, ta: TreeAction):
    m = ta.action.model
    comp = m.full & ~cut.side
    for g in setwise_stabilizer(m.beta(cut.side), ta.action).elements:
        img = ta.action.map_cut(g, cut)
        if img is not None and img.side == comp:
            return g
    return None


def detect_edge_inversion(tree: StructureTree, ta: TreeAction):
    """A group element swapping the two ends of some tree edge, or ``None``."""
    for a, b, c in tree.edges:
        g = find_inversion(c, ta)
        if g is not None:
            return EdgeInversion(g, ta.action.token(g), c, (a, b))
    return None


def _class_transporter(ta: TreeAction, i: int, j: int):
    """Some ``g`` with ``g[i] = j``, or ``None`` if none is visible."""
    tree = ta.tree
    m = ta.action.model
    src = tree.classes[i][0]
    anchor = min(iter_bits(m.beta(src.side) & ~m.marker_mask),
                 key=lambda k: (ta.action.trunc.distance.get(m.vertices[k], 0), m.vertices[k]))
    for D in tree.classes[j]:
        for g in _candidates(ta.action, m.beta(D.side), anchor):
            img = ta.cut_image(g, src)
            if img is not None and tree.class_of[img.side] == j:
                return g
    return None


def quotient(tree: StructureTree, ta: TreeAction, P: int, Q: int, edge_cut: Cut) -> tuple:
    """Quotient multigraph of a single-orbit system, with a completeness report.

    ``P`` and ``Q`` are the end classes of ``edge_cut``'s tree edge.  Every
    class is assigned to the orbit of ``P`` or of ``Q``; classes reached by
    neither are counted as truncation-incomplete.  Cut pairs are checked to
    form one orbit.
    """
    reps = [P] if P == Q else [P, Q]
    same = P == Q or _class_transporter(ta, P, Q) is not None
    if same:
        reps = [P]
    orbit_of = {}
    missing = 0
    for k in range(len(tree.classes)):
        for r in reps:
            if k == r or _class_transporter(ta, r, k) is not None:
                orbit_of[k] = r
                break
        else:
            missing += 1
    vertices = [f"[t{r}]" for r in reps]
    alpha = {"e": f"[t{orbit_of.get(P, P)}]"}
    omega = {"e": f"[t{orbit_of.get(Q, Q)}]"}
    qg = QuotientMultigraph(vertices, ["e"], alpha, omega)
    kind = qg.classify()
    if kind == "other":
        raise InvariantViolation("quotient is neither a loop nor a segment",
                                 {"vertices": vertices})
    return qg, {"classes": len(tree.classes), "assigned": len(orbit_of), "unassigned": missing,
                "kind": kind}


@dataclass
class SplittingDescriptor:
    kind: str                           # "amalgam" or "hnn"
    groups: dict                        # name -> Stabilizer
    stable_letter: object = None        # hnn: witness element
    stable_token: str | None = None
    phi: dict = field(default_factory=dict)
    inversion: dict | None = None
    partial: bool = False

    def to_dict(self) -> dict:
        g = self.groups
        if self.kind == "amalgam":
            A = g["edge"].tokens
            out = {"kind": "amalgam",
                   "vertex_groups": [g["H"].tokens, g["J"].tokens],
                   "edge_group": A,
                   "embeddings": {"A_in_H": list(A), "A_in_J": list(A)},
                   "orders": {"H": g["H"].order, "J": g["J"].order, "A": g["edge"].order}}
        else:
            out = {"kind": "hnn", "base": g["base"].tokens, "A": g["A"].tokens,
                   "B": g["B"].tokens, "phi": dict(self.phi),
                   "stable_letter": self.stable_token,
                   "orders": {"base": g["base"].order, "A": g["A"].order}}
        if self.partial:
            gens = sorted({t for s in g.values() for t in s.tokens if t != IDENTITY})
            out["partial"] = f"partial group, generators found: {', '.join(gens) or 'none'}"
        if self.inversion is not None:
            out["inversion"] = self.inversion
        return out

    @property
    def vertex_orders(self) -> list[int]:
        if self.kind == "amalgam":
            return sorted([self.groups["H"].order, self.groups["J"].order])
        return [self.groups["base"].order]

    @property
    def edge_order(self) -> int:
        return self.groups["edge" if self.kind == "amalgam" else "A"].order


def class_stabilizer(i: int, ta: TreeAction) -> Stabilizer:
    """``G_P`` for the class ``P = i``; candidates come from the stabilizer
    of the union of the members' vertex boundaries."""
    tree = ta.tree
    m = ta.action.model
    beta = 0
    for c in tree.classes[i]:
        beta |= m.beta(c.side)
    beta &= ~m.marker_mask
    good, partial = [], []
    for g in _candidates(ta.action, beta):
        _check_free(ta.action, g, beta)
        j = ta.class_image(g, i)
        if j == i:
            good.append(g)
        elif j is None:
            partial.append(ta.action.token(g))
    elems, toks = _sorted_elements(ta.action, good)
    return Stabilizer(elems, toks, sorted(partial), _closed(ta.action, elems))


def _intersect(a: Stabilizer, b: Stabilizer) -> list[str]:
    return sorted(set(a.tokens) & set(b.tokens), key=lambda t: (t != IDENTITY, len(t), t))


def extract_splitting(tree: StructureTree, ta: TreeAction, C0: Cut) -> tuple:
    """Splitting from the tree edge of ``C0``; returns the descriptor and a report."""
    act = ta.action
    grp = act.group
    sys = tree.system
    C0 = sys.by_side[C0.side]
    Cc = sys.complement(C0)
    P, Q = tree.class_of[Cc.side], tree.class_of[C0.side]
    report = {}
    g_inv = find_inversion(C0, ta)
    G_e = cut_stabilizer(C0, act)
    if g_inv is not None:
        # subdivide: midpoints of cut pairs become vertices, the edge {P, M}
        # has no inversion (classes never map to midpoints)
        sub, origin = barycentric_subdivision(_tree_graph(tree))
        G_M = cut_stabilizer(C0, act, swap=True)
        G_P = class_stabilizer(P, ta)
        if ta.class_image(g_inv, P) != Q:
            raise InvariantViolation("inversion witness does not swap the edge ends")
        edge = _intersect(G_P, G_M)
        if edge != G_e.tokens:
            raise InvariantViolation("edge group differs from G_P ∩ G_M",
                                     {"G_P∩G_M": edge, "G_e": G_e.tokens})
        report.update(inversion=True, subdivided_vertices=len(sub.vertices),
                      quotient="segment", inversion_after_subdivision=False)
        desc = SplittingDescriptor("amalgam", {"H": G_P, "J": G_M, "edge": G_e},
                                   inversion={"element": act.token(g_inv), "cut": cut_encoding(C0)})
    else:
        qg, qrep = quotient(tree, ta, P, Q, C0)
        report.update(inversion=False, quotient=qrep["kind"], quotient_report=qrep)
        G_P = class_stabilizer(P, ta)
        G_Q = class_stabilizer(Q, ta)
        if qrep["kind"] == "segment":
            edge = _intersect(G_P, G_Q)
            if edge != G_e.tokens:
                raise InvariantViolation("edge group differs from G_P ∩ G_Q",
                                         {"G_P∩G_Q": edge, "G_e": G_e.tokens})
            desc = SplittingDescriptor("amalgam", {"H": G_P, "J": G_Q, "edge": G_e})
        else:
            t = _class_transporter(ta, P, Q)
            t_inv = grp.inverse(t)
            B = [grp.multiply(grp.multiply(t, a), t_inv) for a in G_e.elements]
            b_el, b_tok = _sorted_elements(act, B)
            G_B = Stabilizer(b_el, b_tok, [], _closed(act, b_el))
            phi = {act.token(a): act.token(grp.multiply(grp.multiply(t, a), t_inv)) for a in G_e.elements}
            missing = [x for x in b_tok if x not in G_Q.tokens]
            if missing and not G_Q.partial:
                raise InvariantViolation("conjugated edge group is not in the base", {"missing": missing})
            desc = SplittingDescriptor("hnn", {"base": G_Q, "A": G_e, "B": G_B},
                                       stable_letter=t, stable_token=act.token(t), phi=phi)
    desc.partial = any(s.partial for s in desc.groups.values())
    if desc.kind == "amalgam":
        report["proper"] = all(desc.groups[k].order > desc.groups["edge"].order for k in ("H", "J"))
    report["partial_candidates"] = {k: len(s.partial) for k, s in desc.groups.items()}
    return desc, report


def _tree_graph(tree: StructureTree):
    pairs = [(f"t{a}", f"t{b}") for a, b, _ in tree.edges]
    if not pairs:
        return graph_from_edges([("t0", "t0x")])
    return graph_from_edges(pairs)


def _choose_base_cut(opt, gen, model) -> Cut:
    base = model.index[gen.base_vertex]
    hits = [c for c in opt if (model.beta(c.side) >> base) & 1]
    if not hits:
        raise IncreaseRadius("no optimal cut has the base vertex on its boundary")
    return min(hits, key=Cut.sort_key)


def _analyze(gen, radius, probe, k_max, budget):
    trunc = truncate(gen, radius, probe)
    model = trunc.model
    ev = {"radius": radius, "vertices": len(model.vertices), "markers": len(model.end_markers)}
    k = kappa(model, k_max, budget)
    cuts = minimal_cuts(model, k_max, budget)
    idx = m_index(cuts)
    opt = optimal_cuts(cuts, idx)
    ev.update(kappa=k, minimal_cuts=len(cuts), m_star=idx.m_star,
              m_histogram={str(a): b for a, b in idx.histogram().items()}, optimal_cuts=len(opt))
    act = GroupAction(gen, trunc)
    C0 = _choose_base_cut(opt, gen, model)
    orb = orbit_close([C0], act)
    sys = CutSystem(orb.cuts)
    tree = build_tree(sys)
    ta = induced_tree_action(act, tree)
    ev.update(base_cut=cut_encoding(C0), base_cut_boundary=C0.boundary_tokens(),
              orbit_cuts=len(orb.cuts), orbit_completeness=round(orb.completeness, 6),
              orbit_skipped=orb.skipped, classes=len(tree.classes), tree_edges=len(tree.edges),
              undefined_generator_images=ta.undefined)
    desc, rep = extract_splitting(tree, ta, C0)
    ev["splitting_report"] = rep
    return desc, ev


def stallings_pipeline(pres: Group, radius: int = 6, probe: int = 2, k_max: int = 8,
                       budget: int = 10**6, name: str = "cayley") -> tuple:
    """Run the whole chain on a presentation; returns ``(descriptor, evidence)``."""
    gen = CayleyGenerator(pres, name=name)
    ends = count_ends(gen, radius, probe)
    evidence = {"ends": ends}
    if ends in (0, 1):
        try:
            kappa(truncate(gen, radius, probe).model, k_max, budget)
        except NoCutFound as exc:
            evidence["cut_search"] = str(exc)
        reason = "one end" if ends == 1 else "finite group"
        raise NoSplitting(reason, evidence)
    if ends == "unstable":
        raise IncreaseRadius("end count is not stable", evidence)
    desc, ev = _analyze(gen, radius, probe, k_max, budget)
    evidence.update(ev)
    try:
        prev, _ = _analyze(CayleyGenerator(pres, name=name), radius - 1, probe, k_max, budget)
        evidence["previous_radius"] = {
            "radius": radius - 1, "kind": prev.kind, "vertex_orders": prev.vertex_orders,
            "edge_order": prev.edge_order,
            "stable": (prev.kind, prev.vertex_orders, prev.edge_order)
            == (desc.kind, desc.vertex_orders, desc.edge_order)}
    except (NoCutFound, IncreaseRadius, InvariantViolation) as exc:
        evidence["previous_radius"] = {"radius": radius - 1, "stable": False, "error": str(exc)}
    return desc, evidence


# -- verification ----------------------------------------------------------

def _table(tokens, elems, grp, prefix):
    """Finite group table over renamed tokens; returns (table, name->element)."""
    if len(elems) > MAX_TABLE:
        raise Unverifiable(f"group of order {len(elems)} exceeds the table limit {MAX_TABLE}")
    names = {}
    for k, (t, g) in enumerate(zip(tokens, elems)):
        names[IDENTITY if t == IDENTITY else f"{prefix}{k}"] = g
    back = {grp.token(g): n for n, g in names.items()}

    def mul(x, y):
        tok = grp.token(grp.multiply(names[x], names[y]))
        if tok not in back:
            raise PresentationError("closure", f"{x}*{y} leaves the listed elements")
        return back[tok]

    return FiniteGroupTable.from_elements(list(names), mul), names, back


def rebuild_presentation(desc: SplittingDescriptor, pres: Group) -> tuple:
    """Presentation of the descriptor's group and its map ``psi`` on letters."""
    if desc.partial:
        raise Unverifiable("descriptor holds partial (possibly infinite) groups")
    g = desc.groups
    if desc.kind == "amalgam":
        H, hn, hb = _table(g["H"].tokens, g["H"].elements, pres, "h")
        J, jn, jb = _table(g["J"].tokens, g["J"].elements, pres, "j")
        A = [hb[t] for t in g["edge"].tokens]
        B = [jb[t] for t in g["edge"].tokens]
        new = AmalgamPresentation(H, J, A, B, dict(zip(A, B)))
        psi = {**hn, **jn}
    else:
        H, hn, hb = _table(g["base"].tokens, g["base"].elements, pres, "h")
        A = [hb[t] for t in g["A"].tokens]
        phi = {hb[a]: hb[b] for a, b in desc.phi.items()}
        new = HNNPresentation(H, A, sorted(phi.values()), phi, stable="t")
        psi = {**hn, "t": desc.stable_letter}
    return new, psi


def verify_splitting(desc: SplittingDescriptor, pres: Group, radius: int = 4) -> bool:
    """Compare rooted labelled balls of the rebuilt group and the original.

    ``psi`` sends each letter of the rebuilt presentation to its element of
    the original group.  Original generators are expressed as rebuilt
    letters (or their inverses); walking both Cayley balls in lockstep, the
    correspondence must be well defined and injective, so the two balls
    are isomorphic as labelled graphs.
    """
    try:
        new, psi = rebuild_presentation(desc, pres)
    except PresentationError:
        return False
    R = min(radius, 4)
    # express every original generator through one rebuilt letter
    by_tok = {}
    for letter, el in psi.items():
        by_tok.setdefault(pres.token(el), new.normalize([letter]))
        by_tok.setdefault(pres.token(pres.inverse(el)), new.normalize([new.inverse_letter(letter)]))
    gens = pres.symmetric_generators()
    words = {}
    for s in gens:
        tok = pres.token(pres.normalize([s]))
        if tok not in by_tok:
            return False
        words[s] = by_tok[tok]
    fwd = {pres.token(pres.identity): new.token(new.identity)}
    bwd = {new.token(new.identity): pres.token(pres.identity)}
    q = deque([(pres.identity, new.identity, 0)])
    while q:
        x, y, d = q.popleft()
        if d == R:
            continue
        for s in gens:
            x2 = pres.act(x, s)
            y2 = new.multiply(y, words[s])
            tx, ty = pres.token(x2), new.token(y2)
            if tx in fwd or ty in bwd:
                if fwd.get(tx) != ty or bwd.get(ty) != tx:
                    return False
                continue
            fwd[tx], bwd[ty] = ty, tx
            q.append((x2, y2, d + 1))
    return len(fwd) == len(bwd)
