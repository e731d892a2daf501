from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualgraph.model import DualGraph, GraphError
from dualgraph.reductions import barbell_graph, bridge
from dualgraph.structures import (
    approx_ratio,
    check_geographic,
    geometric_dualgraph,
    min_cds_bruteforce,
    verify_cds,
    verify_cds_with_ratio,
    verify_mis,
)

from oracles import all_pairs, all_subsets, is_cds_by_definition, is_mis_by_definition, min_cds_networkx, nx_graph


def ring(n):
    return DualGraph(n, [(i, i % n + 1) for i in range(1, n + 1)])


def path(n):
    return DualGraph(n, [(i, i + 1) for i in range(1, n)])


def complete(n):
    return DualGraph(n, list(itertools.combinations(range(1, n + 1), 2)))


# -- MIS --------------------------------------------------------------------


def test_mis_examples():
    assert verify_mis(DualGraph(1), {1}).valid
    rep = verify_mis(path(3), {1, 2})
    assert not rep.valid and rep.violations[0].kind == "independence" and rep.violations[0].witness == (1, 2)
    assert verify_mis(ring(6), {1, 4}).valid
    rep = verify_mis(ring(6), {1})
    assert [v.witness for v in rep.violations if v.kind == "uncovered"] == [(3,), (4,), (5,)]


def test_unknown_ids_reported():
    rep = verify_mis(path(3), {1, 3, 9})
    assert any(v.kind == "unknown-id" for v in rep.violations)


# -- CDS --------------------------------------------------------------------


def test_cds_examples_on_barbell():
    g = barbell_graph(8, 2)
    a, b = bridge(8, 2)
    assert verify_cds(g, {a, b}).valid
    others = [u for u in range(1, 9) if u not in (a, b)]
    left = next(u for u in others if u <= 4)
    right = next(u for u in others if u > 4)
    rep = verify_cds(g, {left, right})
    assert not rep.valid and {v.kind for v in rep.violations} == {"disconnected"}


def test_cds_examples_on_ring():
    assert verify_cds(ring(6), {1, 2, 3, 4, 5}).valid
    rep = verify_cds(ring(6), {1, 3, 5})
    assert not rep.valid and "disconnected" in {v.kind for v in rep.violations}


def test_min_cds_examples():
    assert min_cds_bruteforce(complete(5)) == 1
    assert min_cds_bruteforce(path(5)) == 3
    assert min_cds_bruteforce(barbell_graph(8, 1)) == 2
    assert min_cds_bruteforce(DualGraph(0)) == 0
    assert min_cds_bruteforce(DualGraph(3, [(1, 2)])) == math.inf


def test_min_cds_size_limit():
    with pytest.raises(ValueError, match="n <= 20"):
        min_cds_bruteforce(ring(21))


def test_approx_ratio():
    assert approx_ratio(path(5), {2, 3, 4}) == 1
    assert verify_cds_with_ratio(path(5), {1, 2, 3, 4}).approx_ratio == Fraction(4, 3)


@st.composite
def small_graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    edges = draw(st.sets(st.sampled_from(all_pairs(n)))) if n > 1 else set()
    return n, sorted(edges)


@given(small_graphs())
@settings(max_examples=150, deadline=None)
def test_min_cds_matches_networkx_enumeration(spec):
    n, edges = spec
    g = DualGraph(n, edges)
    want = min_cds_networkx(nx_graph(n, edges))
    got = min_cds_bruteforce(g)
    assert got == (math.inf if want == -1 else want)


@given(small_graphs(), st.data())
@settings(max_examples=150, deadline=None)
def test_ratio_at_least_one_for_valid_cds(spec, data):
    n, edges = spec
    g = DualGraph(n, edges)
    C = data.draw(st.sets(st.integers(1, n)))
    if verify_cds(g, C).valid:
        assert approx_ratio(g, C) >= 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_verifiers_match_definition_exhaustively_small(n):
    pairs = all_pairs(n)
    for edges in all_subsets(pairs):
        g = DualGraph(n, edges)
        ref = nx_graph(n, edges)
        for S in all_subsets(range(1, n + 1)):
            assert verify_mis(g, S).valid == is_mis_by_definition(ref, S)
            assert verify_cds(g, S).valid == is_cds_by_definition(ref, S)


# -- geometry -----------------------------------------------------------------


def test_geometric_examples():
    g = geometric_dualgraph([(0, 0), (0.5, 0)], gamma=2)
    assert g.reliable_edges == {(1, 2)}
    g = geometric_dualgraph([(0, 0), (2.1, 0)], gamma=2)
    assert not g.reliable_edges and not g.unreliable_extra_edges
    g = geometric_dualgraph([(0, 0), (1.5, 0), (3.0, 0)], gamma=2)
    assert g.reliable_edges == frozenset()
    assert g.unreliable_extra_edges == {(1, 2), (2, 3)}


def test_gamma_below_one_rejected():
    with pytest.raises(GraphError):
        geometric_dualgraph([(0, 0)], gamma=0.5)


@given(st.lists(st.tuples(st.floats(0, 5), st.floats(0, 5)), min_size=1, max_size=25, unique=True), st.floats(1, 3))
@settings(max_examples=100, deadline=None)
def test_geometric_construction_passes_check(points, gamma):
    try:
        g = geometric_dualgraph(points, gamma)
    except GraphError:
        return  # duplicate points after float conversion
    assert check_geographic(g)


def test_complete_prime_on_spread_points_fails():
    pts = np.random.default_rng(0).uniform(0, 20, size=(100, 2))
    close = [(i + 1, j + 1) for i, j in itertools.combinations(range(100), 2) if np.hypot(*(pts[i] - pts[j])) <= 1]
    g = DualGraph.with_complete_prime(100, close, embedding=pts.tolist(), gamma=2.0)
    res = check_geographic(g)
    assert not res and res.distance > 2


def test_two_close_nodes_with_complete_prime_ok():
    g = DualGraph.with_complete_prime(2, [(1, 2)], embedding=[(0, 0), (0.7, 0.2)], gamma=1.5)
    assert check_geographic(g)


def test_missing_embedding_rejected():
    with pytest.raises(ValueError):
        check_geographic(ring(4), 2)
