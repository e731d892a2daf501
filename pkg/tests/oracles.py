"""Independent reference implementations used only by the tests.

Written directly from the definitions with plain loops and networkx, sharing
no code with the package so that agreement is evidence rather than echo.
"""

from __future__ import annotations

import itertools
from typing import Iterable

import networkx as nx


def brute_receptions(n, reliable, unreliable_extra, adversary, broadcasters):
    """Reception rule evaluated pair by pair.

    ``adversary`` is a set of pairs (or the string "all"); returns
    ``{node: (sender, payload, reliable_flag)}``.
    """
    rel = {frozenset(e) for e in reliable}
    extra = {frozenset(e) for e in unreliable_extra}
    active = extra if adversary == "all" else {frozenset(e) for e in adversary}
    topo = rel | active
    out = {}
    for v in range(1, n + 1):
        if v in broadcasters:
            continue
        talking = [u for u in broadcasters if u != v and frozenset((u, v)) in topo]
        if len(talking) == 1:
            u = talking[0]
            out[v] = (u, broadcasters[u], frozenset((u, v)) in rel)
    return out


def all_pairs(n):
    return list(itertools.combinations(range(1, n + 1), 2))


def all_dual_graphs(n):
    """Every (reliable, unreliable-extra) split of the pairs of ``[n]``."""
    pairs = all_pairs(n)
    for labels in itertools.product((0, 1, 2), repeat=len(pairs)):
        rel = [p for p, x in zip(pairs, labels) if x == 2]
        un = [p for p, x in zip(pairs, labels) if x == 1]
        yield rel, un


def all_subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def nx_graph(n, edges) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(1, n + 1))
    g.add_edges_from(edges)
    return g


def is_mis_by_definition(g: nx.Graph, S: Iterable[int]) -> bool:
    S = set(S)
    if not S <= set(g.nodes):
        return False
    independent = all(not g.has_edge(a, b) for a, b in itertools.combinations(S, 2))
    maximal = all(any(g.has_edge(v, s) for s in S) for v in g.nodes if v not in S)
    return independent and maximal


def is_cds_by_definition(g: nx.Graph, C: Iterable[int]) -> bool:
    C = set(C)
    if not C or not C <= set(g.nodes):
        return False
    return nx.is_dominating_set(g, C) and nx.is_connected(g.subgraph(C))


def min_cds_networkx(g: nx.Graph) -> int:
    for r in range(1, g.number_of_nodes() + 1):
        for C in itertools.combinations(g.nodes, r):
            if is_cds_by_definition(g, C):
                return r
    return -1


def view_graph_double_loop(m: int):
    """Vertices and edge set of B(1, m) by checking every ordered pair of triples."""
    verts = [v for v in itertools.product(range(1, m + 1), repeat=3) if len(set(v)) == 3]
    edges = set()
    for a in verts:
        for b in verts:
            # b = (y, a1, a2) with y != a3
            if b[1] == a[0] and b[2] == a[1] and b[0] != a[2]:
                edges.add(frozenset((a, b)))
    return verts, edges


def ring_coloring_proper(order, colors) -> bool:
    n = len(order)
    return all(colors[order[i]] != colors[order[(i + 1) % n]] for i in range(n))
