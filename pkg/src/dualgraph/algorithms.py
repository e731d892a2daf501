"""Baseline node algorithms and centralised ground-truth oracles.

All algorithms follow the two-phase contract of :mod:`dualgraph.model`: a
process only *declares* its broadcast probability; the engine flips the
coin.  Their out-functions are pure functions of (id, known neighbours,
reception history), so a node that hears nothing decides exactly as it would
with an empty history.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import DualGraph, History, Reception

IN, OUT, UNDECIDED = b"I", b"O", b"U"


def _reliable(rec: Reception, neighbors: frozenset[int] | None) -> bool:
    # advance knowledge filters by the neighbour list, passive by the tag
    return rec.sender in neighbors if neighbors is not None else rec.reliable


def greedy_status(node_id: int, neighbors: frozenset[int] | None, history: Iterable[Reception]) -> bytes:
    """Local view of the ascending-id greedy MIS.

    A node is out once a lower reliable neighbour reports it joined and in
    once every lower neighbour reports it is out.  Without advance knowledge
    the lower neighbours are only those heard so far, and a node that has
    heard nobody stays undecided.
    """
    reports: dict[int, bytes] = {}
    for rec in history:
        if _reliable(rec, neighbors) and rec.payload[:1] in (IN, OUT, UNDECIDED):
            reports[rec.sender] = rec.payload[:1]
    if neighbors is None:
        if not reports:
            return UNDECIDED
        known = reports.keys()
    else:
        known = neighbors
    lower = [v for v in known if v < node_id]
    if any(reports.get(v) == IN for v in lower):
        return OUT
    if all(reports.get(v) == OUT for v in lower):
        return IN
    return UNDECIDED


class _DecayProcess:
    def __init__(self, alg: "DecayMIS", node_id: int, neighbors: frozenset[int] | None) -> None:
        self.alg = alg
        self.id = node_id
        self.neighbors = neighbors
        self.history: list[Reception] = []
        self.status = greedy_status(node_id, neighbors, ())

    def intent(self, round: int) -> tuple[float, bytes]:
        return self.alg.decay(round), self.status

    def receive(self, round: int, reception: Reception | None) -> None:
        if reception is not None:
            self.history.append(reception)
            self.status = greedy_status(self.id, self.neighbors, self.history)


@dataclass(frozen=True)
class DecayMIS:
    """Decay-style randomised MIS baseline.

    Nodes announce their greedy status (in / out / undecided) with
    probability ``2^-i`` in the ``i``-th round of each phase of
    ``phase_length`` rounds.  Undecided nodes join with the prior ``q``.
    """

    n: int
    q: float = 0.5
    phase_length: int = 0
    name: str = "decay-mis"

    def __post_init__(self) -> None:
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if self.phase_length <= 0:
            object.__setattr__(self, "phase_length", max(1, math.ceil(math.log2(max(self.n, 2)))) + 1)

    def decay(self, round: int) -> float:
        return 2.0 ** -((round - 1) % self.phase_length)

    def default_rounds(self) -> int:
        """Round budget for a full greedy chain: three phases per id."""
        return 3 * self.n * self.phase_length

    def process(self, node_id, n, neighbors):
        return _DecayProcess(self, node_id, neighbors)

    def out(self, node_id, neighbors, history: History) -> float:
        status = greedy_status(node_id, neighbors, history)
        if status == IN:
            return 1.0
        if status == OUT:
            return 0.0
        return self.q


@dataclass(frozen=True)
class DecayCDS(DecayMIS):
    """DecayMIS plus a connector rule: an out node that heard two or more
    distinct joined neighbours also joins."""

    name: str = "decay-cds"

    def out(self, node_id, neighbors, history: History) -> float:
        status = greedy_status(node_id, neighbors, history)
        if status == IN:
            return 1.0
        if status == OUT:
            joined = {r.sender for r in history if _reliable(r, neighbors) and r.payload[:1] == IN}
            return 1.0 if len(joined) >= 2 else 0.0
        return self.q


class _Silent:
    def intent(self, round):
        return 0.0, b""

    def receive(self, round, reception):
        pass


@dataclass(frozen=True)
class ConstantP:
    """Never transmits; every node joins with probability ``p``."""

    p: float = 1.0
    name: str = "constant-p"

    def process(self, node_id, n, neighbors):
        return _Silent()

    def out(self, node_id, neighbors, history) -> float:
        return self.p


@dataclass(frozen=True)
class LocalMinimum:
    """Never transmits; joins iff its id is below every known neighbour id."""

    name: str = "local-min"

    def process(self, node_id, n, neighbors):
        return _Silent()

    def out(self, node_id, neighbors, history) -> float:
        return 1.0 if not neighbors or node_id < min(neighbors) else 0.0


@dataclass(frozen=True)
class FixedSet:
    """Never transmits; joins iff its id is in ``members`` (feeds oracle answers through the engine)."""

    members: frozenset[int]
    name: str = "fixed-set"

    def process(self, node_id, n, neighbors):
        return _Silent()

    def out(self, node_id, neighbors, history) -> float:
        return 1.0 if node_id in self.members else 0.0


# -- round robin ----------------------------------------------------------


def _encode_map(known: Mapping[int, frozenset[int]]) -> bytes:
    return json.dumps({str(u): sorted(v) for u, v in sorted(known.items())}, separators=(",", ":")).encode()


def _merge(known: dict[int, frozenset[int]], payload: bytes) -> None:
    try:
        doc = json.loads(payload)
    except ValueError:
        return
    if not isinstance(doc, dict):
        return
    for u, nbrs in doc.items():
        known.setdefault(int(u), frozenset(int(v) for v in nbrs))


def _known_map(node_id: int, neighbors: frozenset[int], history: Iterable[Reception]) -> dict[int, frozenset[int]]:
    known = {node_id: frozenset(neighbors)}
    for rec in history:
        _merge(known, rec.payload)
    return known


def greedy_mis_of(adj: Mapping[int, Iterable[int]], nodes: Iterable[int]) -> set[int]:
    chosen: set[int] = set()
    for u in sorted(nodes):
        if not any(v in chosen for v in adj[u]):
            chosen.add(u)
    return chosen


class _RoundRobinProcess:
    def __init__(self, alg: "RoundRobin", node_id: int, neighbors: frozenset[int]) -> None:
        self.alg = alg
        self.id = node_id
        self.known = {node_id: frozenset(neighbors)}

    def intent(self, round: int) -> tuple[float, bytes]:
        if (round - 1) % self.alg.n + 1 == self.id:
            return 1.0, _encode_map(self.known)
        return 0.0, b""

    def receive(self, round, reception):
        if reception is not None:
            _merge(self.known, reception.payload)


@dataclass(frozen=True)
class RoundRobin:
    """Node ``j`` transmits everything it knows about ``G`` in slot ``j``.

    One phase is ``n`` rounds; with ``phases`` phases knowledge spreads
    ``phases`` hops.  A node whose known adjacency lists close over its
    component computes the ascending-id greedy MIS of it; otherwise it joins
    iff its id is below all its reliable neighbours.
    """

    n: int
    phases: int = 1
    name: str = "round-robin"

    @property
    def rounds(self) -> int:
        return self.n * self.phases

    def default_rounds(self) -> int:
        return self.rounds

    def process(self, node_id, n, neighbors):
        if n != self.n:
            raise ValueError(f"round-robin built for n={self.n}, network has n={n}")
        if neighbors is None:
            raise ValueError("round-robin needs advance neighbourhood knowledge")
        return _RoundRobinProcess(self, node_id, neighbors)

    def out(self, node_id, neighbors, history) -> float:
        if neighbors is None:
            raise ValueError("round-robin needs advance neighbourhood knowledge")
        known = _known_map(node_id, neighbors, history)
        comp = {node_id}
        queue = deque([node_id])
        closed = True
        while queue:
            u = queue.popleft()
            if u not in known:
                closed = False
                continue
            for v in known[u]:
                if v not in comp:
                    comp.add(v)
                    queue.append(v)
        if closed:
            return 1.0 if node_id in greedy_mis_of(known, comp) else 0.0
        return 1.0 if not neighbors or node_id < min(neighbors) else 0.0


ALGORITHMS = {
    "decay-mis": DecayMIS,
    "decay-cds": DecayCDS,
    "round-robin": RoundRobin,
    "constant-p": ConstantP,
    "local-min": LocalMinimum,
}


def make_algorithm(name: str, n: int, **params):
    """Instantiate a registered algorithm for a network of ``n`` nodes."""
    try:
        cls = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None
    if cls in (DecayMIS, DecayCDS, RoundRobin):
        return cls(n=n, **params)
    return cls(**params)


# -- centralised oracles --------------------------------------------------

EXACT_MIS_LIMIT = 12


def greedy_mis(graph: DualGraph, order: Iterable[int] | None = None) -> frozenset[int]:
    """Greedy maximal independent set of ``G`` (ascending ids by default)."""
    adj = graph.adjacency
    chosen: set[int] = set()
    for u in (order if order is not None else graph.nodes):
        if not (adj[u] & chosen):
            chosen.add(u)
    return frozenset(chosen)


def all_mis(graph: DualGraph) -> list[frozenset[int]]:
    """Every maximal independent set of ``G``, by exhaustive enumeration."""
    n = graph.n
    if n > EXACT_MIS_LIMIT:
        raise ValueError(f"exact MIS enumeration is limited to n <= {EXACT_MIS_LIMIT} (got n={n})")
    adj = graph.adjacency
    found = []
    for size in range(n + 1):
        for combo in itertools.combinations(graph.nodes, size):
            s = set(combo)
            if any(adj[u] & s for u in s):
                continue
            if all(u in s or adj[u] & s for u in graph.nodes):
                found.append(frozenset(s))
    return found


def cds_from_mis(graph: DualGraph, mis: Iterable[int] | None = None) -> frozenset[int]:
    """Connect an MIS into a CDS by adding shortest-path relays between components."""
    adj = graph.adjacency
    chosen = set(mis if mis is not None else greedy_mis(graph))
    if not chosen:
        return frozenset()
    while True:
        start = min(chosen)
        reach = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v in chosen and v not in reach:
                    reach.add(v)
                    queue.append(v)
        if reach == chosen:
            return frozenset(chosen)
        # BFS through G from the component containing `start` to any other chosen node
        parent: dict[int, int | None] = {u: None for u in reach}
        queue = deque(sorted(reach))
        target = None
        while queue and target is None:
            u = queue.popleft()
            for v in sorted(adj[u]):
                if v in parent:
                    continue
                parent[v] = u
                if v in chosen:
                    target = v
                    break
                queue.append(v)
        if target is None:
            raise ValueError("G is disconnected; no CDS exists")
        node = parent[target]
        while node is not None and node not in reach:
            chosen.add(node)
            node = parent[node]
