"""Adversaries that pick the unreliable edges active in each round.

Three classes: static (one fixed subset forever), online adaptive (sees the
declared broadcast probabilities of the round but not the coin flips) and
offline adaptive (also sees who actually transmits).  The engine enforces the
knowledge boundary by ordering: online strategies are called before any
broadcast coin of the round exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .model import ALL_UNRELIABLE, DualGraph, Edge, RoundTranscript, edge


@dataclass(frozen=True)
class AdversaryView:
    """What an adaptive adversary may look at when choosing for round ``round``."""

    graph: DualGraph
    round: int
    transcript: tuple[RoundTranscript, ...]
    declared: Mapping[int, float]


class Adversary:
    kind = "abstract"
    sees_coins = False

    def choose(self, view: AdversaryView, broadcasters: Mapping[int, bytes] | None = None):
        raise NotImplementedError


class StaticAdversary(Adversary):
    kind = "static"

    def __init__(self, edges) -> None:
        self.edges = edges if edges is ALL_UNRELIABLE else frozenset(edge(*e) for e in edges)

    def choose(self, view, broadcasters=None):
        return self.edges

    def __repr__(self) -> str:
        return f"StaticAdversary({self.edges!r})"


class OnlineAdaptiveAdversary(Adversary):
    kind = "online_adaptive"

    def __init__(self, strategy: Callable[[AdversaryView], object], name: str = "online") -> None:
        self.strategy = strategy
        self.name = name

    def choose(self, view, broadcasters=None):
        # broadcasters is never forwarded: the strategy cannot see this round's coins
        return self.strategy(view)


class OfflineAdaptiveAdversary(Adversary):
    """Interface only; no strategy of this class is needed for the lower bounds."""

    kind = "offline_adaptive"
    sees_coins = True

    def __init__(self, strategy: Callable[[AdversaryView, Mapping[int, bytes]], object], name: str = "offline") -> None:
        self.strategy = strategy
        self.name = name

    def choose(self, view, broadcasters=None):
        if broadcasters is None:
            raise ValueError("offline adaptive adversaries need the realised broadcast set")
        return self.strategy(view, broadcasters)


def static_all_edges(graph: DualGraph | None = None) -> StaticAdversary:
    """Include every edge of ``E' \\ E`` in every round."""
    return StaticAdversary(ALL_UNRELIABLE)


def static_no_edges(graph: DualGraph | None = None) -> StaticAdversary:
    return StaticAdversary(frozenset())


def expected_broadcasters(probabilities: Iterable[float]) -> float:
    """E[B_r]: the sum of independent broadcast probabilities."""
    total = 0.0
    for p in probabilities:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
        total += p
    return total


def threshold_adversary(graph: DualGraph, c: float = 3.0) -> OnlineAdaptiveAdversary:
    """All unreliable edges when E[B_r] >= c*log2(n), none otherwise.

    Heavy rounds get the complete topology so that two or more transmitters
    jam everyone; light rounds keep only ``G`` so few nodes can hear.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if graph.n < 2:
        raise ValueError("threshold adversary needs n >= 2")
    cutoff = c * math.log2(graph.n)
    empty: frozenset[Edge] = frozenset()

    def strategy(view: AdversaryView):
        return ALL_UNRELIABLE if expected_broadcasters(view.declared.values()) >= cutoff else empty

    adv = OnlineAdaptiveAdversary(strategy, name=f"threshold(c={c})")
    adv.c = c
    adv.cutoff = cutoff
    return adv


def adversary_from_config(graph: DualGraph, spec: Mapping) -> Adversary:
    """Build from ``{"kind": "static_all"|"static_none"|"threshold", "c": ...}``."""
    kind = spec.get("kind", "static_none")
    if kind == "static_all":
        return static_all_edges(graph)
    if kind == "static_none":
        return static_no_edges(graph)
    if kind == "threshold":
        return threshold_adversary(graph, float(spec.get("c", 3.0)))
    raise ValueError(f"unknown adversary kind {kind!r}")
