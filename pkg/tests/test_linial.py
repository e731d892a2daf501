from __future__ import annotations

import itertools
import json
import random
from pathlib import Path

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from dualgraph.linial import (
    ColoringBudgetExceeded,
    adjacency_from_edges,
    build_view_graph,
    chromatic_number_exact,
    find_monochromatic_edge,
    k_colorable,
    tabu_coloring,
    view_graph_chromatic_numbers,
)

from oracles import view_graph_double_loop

FIXTURES = Path(__file__).parent / "fixtures"


def brute_chromatic(n, edges):
    for k in range(1, n + 1):
        for col in itertools.product(range(k), repeat=n):
            if all(col[a] != col[b] for a, b in edges):
                return k
    return 0


def test_view_graph_counts():
    vg = build_view_graph(1, 3)
    assert len(vg.vertices) == 6 and vg.num_edges == 0
    assert len(build_view_graph(1, 5).vertices) == 60


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_view_graph_matches_double_loop(m):
    verts, edges = view_graph_double_loop(m)
    vg = build_view_graph(1, m)
    assert set(vg.vertices) == set(verts)
    assert {frozenset(e) for e in vg.edges} == edges


def test_view_graph_refuses_tiny_m():
    with pytest.raises(ValueError):
        build_view_graph(1, 2)
    with pytest.raises(ValueError):
        build_view_graph(0, 5)


@pytest.mark.parametrize("m", [4, 5, 6, 7])
def test_view_graph_edge_count_formula(m):
    vg = build_view_graph(1, m)
    assert vg.num_edges == len(vg.vertices) * (m - 3)


def test_small_chromatic_numbers():
    k4 = adjacency_from_edges(4, list(itertools.combinations(range(4), 2)))
    assert chromatic_number_exact(k4).chi == 4
    c7 = adjacency_from_edges(7, [(i, (i + 1) % 7) for i in range(7)])
    assert chromatic_number_exact(c7).chi == 3


@given(st.integers(1, 7), st.data())
@settings(max_examples=120, deadline=None)
def test_exact_solver_matches_brute_force(n, data):
    pairs = list(itertools.combinations(range(n), 2))
    edges = sorted(data.draw(st.sets(st.sampled_from(pairs)))) if pairs else []
    res = chromatic_number_exact(adjacency_from_edges(n, edges))
    assert res.chi == brute_chromatic(n, edges)
    assert res.proper(adjacency_from_edges(n, edges))


@given(st.integers(2, 30), st.floats(0.05, 0.6), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_exact_solver_matches_networkx_bounds(n, p, seed):
    g = nx.gnp_random_graph(n, p, seed=seed)
    adj = adjacency_from_edges(n, list(g.edges))
    res = chromatic_number_exact(adj)
    greedy = max(nx.greedy_color(g, "DSATUR").values(), default=-1) + 1
    clique = max((len(c) for c in nx.find_cliques(g)), default=0)
    assert clique <= res.chi <= greedy
    if res.chi > 1:
        col, _ = k_colorable(adj, res.chi - 1)
        assert col is None


def test_tabu_never_returns_improper():
    vg = build_view_graph(1, 6)
    col = tabu_coloring(vg.adjacency, 3, seed=1)
    assert col is not None and all(col[i] != col[j] for i, nb in enumerate(vg.adjacency) for j in nb)


def test_budget_exceeded_reports_frontier():
    vg = build_view_graph(1, 7)
    with pytest.raises(ColoringBudgetExceeded) as info:
        chromatic_number_exact(vg.adjacency, max_nodes=1000)
    assert info.value.frontier["lower_bound"] >= 1


def test_view_graph_table_matches_fixture():
    fixture = json.loads((FIXTURES / "view_graph_chi.json").read_text())
    results = view_graph_chromatic_numbers(1, 8, time_budget=300)
    for m, res in results.items():
        assert res.chi == fixture[str(m)]
        assert res.proper(build_view_graph(1, m).adjacency)
    chis = [results[m].chi for m in sorted(results)]
    assert chis == sorted(chis)
    assert all(results[m].chi >= 3 for m in results if m >= 5)


@pytest.mark.parametrize("seed", range(5))
def test_relabeling_invariance(seed):
    rng = random.Random(seed)
    perm = list(range(1, 7))
    rng.shuffle(perm)
    base = build_view_graph(1, 6)
    relabelled = base.relabel(dict(zip(range(1, 7), perm)))
    # rebuild adjacency from the relabelled vertex tuples via the definition
    idx = relabelled.index
    adj = [[] for _ in relabelled.vertices]
    for i, v in enumerate(relabelled.vertices):
        for y in range(1, 7):
            if y not in v:
                j = idx[(y,) + v[:-1]]
                adj[i].append(j)
                adj[j].append(i)
    assert chromatic_number_exact(adj).chi == chromatic_number_exact(base.adjacency).chi == 3


def test_monochromatic_edge_finder():
    vg = build_view_graph(1, 5)
    res = chromatic_number_exact(vg.adjacency)
    proper = {v: res.coloring[i] for i, v in enumerate(vg.vertices)}
    assert find_monochromatic_edge(vg, proper) is None
    v1, v2 = find_monochromatic_edge(vg, lambda v: 1)
    assert v2[1:] == v1[:-1] and v2[0] != v1[-1]


def test_three_colouring_of_b17_always_fails():
    vg = build_view_graph(1, 7)
    # any 3-valued rule, e.g. a colour derived from the centre id
    v1, v2 = find_monochromatic_edge(vg, lambda v: v[1] % 3)
    assert (v1[1] % 3) == (v2[1] % 3)
    rng = random.Random(0)
    table = {v: rng.randrange(3) for v in vg.vertices}
    assert find_monochromatic_edge(vg, table) is not None


def test_partial_colouring_rejected():
    vg = build_view_graph(1, 4)
    with pytest.raises(ValueError):
        find_monochromatic_edge(vg, {vg.vertices[0]: 1})
