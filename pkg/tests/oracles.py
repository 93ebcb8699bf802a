"""Independent brute-force oracles built on networkx."""

import itertools

import networkx as nx


def nx_graph(g):
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from((g.vertices[u], g.vertices[v]) for u, v in g.ends)
    return G


def boundary(g, S):
    return frozenset(e for e, (u, v) in zip(g.edges, g.ends) if (g.vertices[u] in S) != (g.vertices[v] in S))


def separators_containing(g, e, k):
    """Every k-set of unprotected edges through ``e`` whose removal leaves
    exactly two components that it joins."""
    G = nx_graph(g)
    free = [x for x in g.edges if x != e and x not in g.protected]
    ends = {x: (g.vertices[u], g.vertices[v]) for x, (u, v) in zip(g.edges, g.ends)}
    out = set()
    for rest in itertools.combinations(free, k - 1):
        F = set(rest) | {e}
        H = G.copy()
        H.remove_edges_from(ends[x] for x in F)
        comps = list(nx.connected_components(H))
        if len(comps) != 2:
            continue
        if boundary(g, comps[0]) == F:
            out.add(frozenset(F))
    return out


def all_cuts(g):
    """(boundary size, side) for every cut, by subset enumeration."""
    G = nx_graph(g)
    V = list(g.vertices)
    markers = set(g.end_markers)
    out = []
    for r in range(1, len(V)):
        for S in itertools.combinations(V, r):
            S = set(S)
            T = set(V) - S
            if not (S & markers and T & markers):
                continue
            if not (nx.is_connected(G.subgraph(S)) and nx.is_connected(G.subgraph(T))):
                continue
            b = boundary(g, S)
            if b & set(g.protected):
                continue
            out.append((len(b), frozenset(S)))
    return out
