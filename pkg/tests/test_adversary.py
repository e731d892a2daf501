from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualgraph.adversary import (
    AdversaryView,
    adversary_from_config,
    expected_broadcasters,
    static_all_edges,
    static_no_edges,
    threshold_adversary,
)
from dualgraph.algorithms import DecayMIS
from dualgraph.model import ALL_UNRELIABLE, Coins, DualGraph, run_execution
from dualgraph.reductions import barbell_graph
from dualgraph.seeding import derive_seed


def view(graph, probs, r=1):
    return AdversaryView(graph, r, (), dict(enumerate(probs, start=1)))


def test_static_choice_never_changes():
    g = DualGraph(4, [(1, 2)], [(2, 3), (3, 4)])
    adv = static_all_edges(g)
    assert adv.choose(view(g, [0] * 4, 1)) is adv.choose(view(g, [1] * 4, 10**6))
    assert static_no_edges(g).choose(view(g, [1] * 4)) == frozenset()


def test_empty_unreliable_set_means_empty_topology_extra():
    g = DualGraph(3, [(1, 2), (2, 3)])
    res = run_execution(g, static_all_edges(g), DecayMIS(3), "advance", 5, 0)
    assert all(g.expand(rt.adversary_edges) == frozenset() for rt in res.transcript)


def test_barbell_rounds_are_complete():
    g = barbell_graph(8, 3)
    res = run_execution(g, static_all_edges(g), DecayMIS(8), "passive", 6, 1)
    everything = g.reliable_edges | g.unreliable_extra_edges
    assert len(everything) == 8 * 7 // 2
    assert all(rt.adversary_edges is ALL_UNRELIABLE for rt in res.transcript)


def test_threshold_examples():
    g = DualGraph.with_complete_prime(16, [])
    adv = threshold_adversary(g, c=1.0)
    assert adv.choose(view(g, [1.0] * 16)) is ALL_UNRELIABLE
    assert adv.choose(view(g, [1.0] + [0.0] * 15)) == frozenset()


@given(st.integers(2, 64), st.floats(0.1, 5), st.data())
@settings(max_examples=200, deadline=None)
def test_threshold_is_all_or_nothing(n, c, data):
    g = DualGraph.with_complete_prime(n, [(i, i + 1) for i in range(1, n)])
    probs = data.draw(st.lists(st.floats(0, 1), min_size=n, max_size=n))
    choice = threshold_adversary(g, c).choose(view(g, probs))
    assert choice is ALL_UNRELIABLE or choice == frozenset()
    assert (choice is ALL_UNRELIABLE) == (sum(probs) >= c * math.log2(n))


def test_threshold_rejects_bad_parameters():
    g = DualGraph(4)
    with pytest.raises(ValueError):
        threshold_adversary(g, 0)
    with pytest.raises(ValueError):
        threshold_adversary(DualGraph(1), 3)


def test_expected_broadcasters_examples():
    assert expected_broadcasters([0, 0, 0]) == 0
    assert expected_broadcasters([0.5, 0.5, 1.0]) == 2.0
    with pytest.raises(ValueError):
        expected_broadcasters([1.2])


def test_expected_broadcasters_matches_coin_flips():
    rng = np.random.default_rng(3)
    p = rng.random(64)
    coins = Coins(derive_seed(5, "flips"))
    counts = np.array([(coins.broadcast(r, 64) < p).sum() for r in range(1, 100_001)])
    se = counts.std(ddof=1) / math.sqrt(len(counts))
    assert abs(counts.mean() - expected_broadcasters(p)) < 3 * se


def test_config_builder():
    g = DualGraph(4, [(1, 2)], [(3, 4)])
    assert adversary_from_config(g, {"kind": "threshold", "c": 2}).c == 2
    assert adversary_from_config(g, {"kind": "static_all"}).edges is ALL_UNRELIABLE
    with pytest.raises(ValueError):
        adversary_from_config(g, {"kind": "oracle"})
