"""Algorithm-driven constructions that turn MIS/CDS algorithms into game players.

* :class:`ColoringPlayer` plays selective ring colouring with an MIS
  algorithm: it commits to the colours nodes would pick with an empty
  history, simulates the algorithm on the revealed ring under the threshold
  adversary and names every node that heard something as an exception.
* :func:`build_cds_hard_network` builds the core / point-set network from a
  CDS algorithm's own join probabilities.
* :class:`IsolationPlayerFromCDS` and :class:`BitRevealPlayerFromMIS`
  simulate an algorithm on a network they only partly know (a barbell with
  a hidden bridge, G_kappa with hidden set shapes) and spend game moves to
  keep the simulation exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .adversary import AdversaryView, threshold_adversary
from .games import Guess, Reveal, RingAssignment, TripleColoring
from .model import (
    ALL_UNRELIABLE,
    Algorithm,
    DualGraph,
    Execution,
    KnowledgeMode,
    Reception,
    RoundTranscript,
    resolve_round,
    run_execution,
)
from .seeding import derive_seed, uniform_from_bits


class KappaStore:
    """Lazily generated random strings, one 64-bit word per key.

    A key's word is fixed for the lifetime of the seed, so the committed
    colouring and the later simulation resolve the same decision identically.
    """

    def __init__(self, seed: int) -> None:
        self.seed = seed
        self._cache: dict[tuple, int] = {}

    def bits(self, key: tuple) -> int:
        v = self._cache.get(key)
        if v is None:
            v = self._cache[key] = derive_seed(self.seed, "kappa", key)
        return v

    def uniform(self, key: tuple) -> float:
        return uniform_from_bits(self.bits(key))

    def decide(self, key: tuple, p: float) -> bool:
        """True with probability ``p`` (53-bit resolution)."""
        return self.uniform(key) < p


# -- ring helpers ----------------------------------------------------------


def ring_dualgraph(assignment: RingAssignment) -> DualGraph:
    """Ring ``G`` under the given id assignment, ``G'`` complete."""
    return DualGraph.with_complete_prime(assignment.n, assignment.edges())


def ring_orientation(graph: DualGraph) -> RingAssignment:
    """Recover an oriented ring from ``G`` (clockwise from id 1 toward its smaller neighbour)."""
    n = graph.n
    adj = graph.adjacency
    if n < 3 or any(len(adj[u]) != 2 for u in graph.nodes):
        raise ValueError("reliable graph is not a ring")
    order = [1]
    prev, cur = 1, min(adj[1])
    while cur != 1:
        order.append(cur)
        nxt = next(v for v in adj[cur] if v != prev)
        prev, cur = cur, nxt
        if len(order) > n:
            break
    if len(order) != n:
        raise ValueError("reliable graph is not a single ring")
    return RingAssignment(tuple(order))


# -- MIS -> 3-colouring ----------------------------------------------------

ANNOUNCE = b"A"


def _announce_payload(left: int, right: int) -> bytes:
    return ANNOUNCE + f"{left}:{right}".encode()


def _announce_targets(payload: bytes) -> tuple[int, int] | None:
    if payload[:1] != ANNOUNCE:
        return None
    left, right = payload[1:].split(b":")
    return int(left), int(right)


@dataclass
class ColoringRun:
    colors: dict[int, int]
    mis: frozenset[int]
    mis_transcript: list[RoundTranscript]
    announce_transcript: list[RoundTranscript]
    mis_histories: dict[int, tuple[Reception, ...]]

    @property
    def mis_receivers(self) -> frozenset[int]:
        return frozenset(u for rt in self.mis_transcript for u in rt.receptions)

    @property
    def all_receivers(self) -> frozenset[int]:
        return self.mis_receivers | frozenset(u for rt in self.announce_transcript for u in rt.receptions)

    def proper(self, assignment: RingAssignment) -> bool:
        return all(self.colors[a] != self.colors[b] for a, b in assignment.edges())


@dataclass(frozen=True)
class ColoringTransform:
    """Ring 3-colouring from an MIS algorithm.

    MIS nodes take colour 1 and announce in their id slot (one slot per id,
    so announcements never collide).  A non-MIS node whose clockwise
    neighbour announced takes colour 2, every other non-MIS node colour 3.
    """

    mis_algorithm: Algorithm

    def join_probability(self, left: int, node: int, right: int, history: tuple[Reception, ...]) -> float:
        return self.mis_algorithm.out(node, frozenset((left, right)), history)

    def committed_color(self, kappa: KappaStore, left: int, node: int, right: int) -> int:
        """Colour chosen with an empty history: no announcement can have arrived."""
        joined = kappa.decide((left, node, right), self.join_probability(left, node, right, ()))
        return 1 if joined else 3

    @staticmethod
    def color_from(joined: bool, node: int, right: int, announcements: Iterable[Reception]) -> int:
        if joined:
            return 1
        for rec in announcements:
            targets = _announce_targets(rec.payload)
            if rec.sender == right and targets is not None and targets[0] == node:
                return 2
        return 3

    def announce(
        self,
        graph: DualGraph,
        assignment: RingAssignment,
        mis: Iterable[int],
        c: float = 3.0,
        first_round: int = 1,
    ) -> list[RoundTranscript]:
        """The ``n`` id-slotted announcement rounds under the threshold adversary.

        Slots whose owner is not in the MIS are silent and skipped.
        """
        mis = frozenset(mis)
        adv = threshold_adversary(graph, c)
        orient = assignment.oriented_neighbors()
        out = []
        for slot in range(1, assignment.n + 1):
            if slot not in mis:
                continue
            r = first_round + slot - 1
            declared = {u: (1.0 if u == slot else 0.0) for u in graph.nodes}
            choice = adv.choose(AdversaryView(graph, r, tuple(out), declared))
            left, right = orient[slot]
            sent = {slot: _announce_payload(left, right)}
            out.append(RoundTranscript(r, sent, choice, resolve_round(graph, choice, sent, r)))
        return out

    def colors_for_mis(self, assignment: RingAssignment, mis: Iterable[int], c: float = 3.0) -> tuple[dict[int, int], list[RoundTranscript]]:
        graph = ring_dualgraph(assignment)
        mis = frozenset(mis)
        ann = self.announce(graph, assignment, mis, c)
        heard: dict[int, list[Reception]] = {u: [] for u in graph.nodes}
        for rt in ann:
            for u, rec in rt.receptions.items():
                heard[u].append(rec)
        orient = assignment.oriented_neighbors()
        colors = {u: self.color_from(u in mis, u, orient[u][1], heard[u]) for u in graph.nodes}
        return colors, ann

    def run(
        self,
        assignment: RingAssignment | DualGraph,
        rounds: int,
        c: float,
        seed: int,
        kappa: KappaStore | None = None,
    ) -> ColoringRun:
        """Full execution: ``rounds`` MIS rounds, join decisions, announcements, colours.

        Join coins come from ``kappa`` keyed by the node's oriented triple when
        given, otherwise from the engine's output coins.
        """
        if isinstance(assignment, DualGraph):
            assignment = ring_orientation(assignment)
        graph = ring_dualgraph(assignment)
        orient = assignment.oriented_neighbors()
        res = run_execution(graph, threshold_adversary(graph, c), self.mis_algorithm, KnowledgeMode.ADVANCE, rounds, seed)
        if kappa is None:
            mis = res.joined
        else:
            mis = frozenset(
                u
                for u in graph.nodes
                if kappa.decide(
                    (orient[u][0], u, orient[u][1]),
                    self.join_probability(orient[u][0], u, orient[u][1], res.histories[u]),
                )
            )
        ann = self.announce(graph, assignment, mis, c, first_round=rounds + 1)
        heard: dict[int, list[Reception]] = {u: [] for u in graph.nodes}
        for rt in ann:
            for u, rec in rt.receptions.items():
                heard[u].append(rec)
        colors = {u: self.color_from(u in mis, u, orient[u][1], heard[u]) for u in graph.nodes}
        return ColoringRun(colors, mis, res.transcript, ann, res.histories)


def mis_to_coloring_transform(mis_algorithm: Algorithm) -> ColoringTransform:
    return ColoringTransform(mis_algorithm)


class ColoringPlayer:
    """Selective ring colouring player built from an MIS algorithm.

    ``accounting="mis_phase"`` names as exceptions the nodes that heard a
    message during the MIS rounds; ``"full"`` also counts the announcement
    rounds.
    """

    def __init__(
        self,
        mis_algorithm: Algorithm,
        rounds: int,
        c: float = 3.0,
        seed: int = 0,
        accounting: str = "mis_phase",
    ) -> None:
        if accounting not in ("mis_phase", "full"):
            raise ValueError("accounting must be 'mis_phase' or 'full'")
        self.transform = ColoringTransform(mis_algorithm)
        self.rounds = rounds
        self.c = c
        self.seed = seed
        self.accounting = accounting
        self.kappa = KappaStore(derive_seed(seed, "kappa-store"))
        self.run: ColoringRun | None = None
        self.assignment: RingAssignment | None = None

    def coloring(self, n: int) -> TripleColoring:
        kappa, tf = self.kappa, self.transform
        return TripleColoring(n, lambda i, j, k: tf.committed_color(kappa, i, j, k), seed=self.kappa.seed)

    def receive_assignment(self, assignment: RingAssignment, coloring: TripleColoring | None = None) -> None:
        self.assignment = assignment
        self.run = self.transform.run(assignment, self.rounds, self.c, derive_seed(self.seed, "simulation"), self.kappa)

    def exceptions(self) -> set[int]:
        if self.run is None:
            raise RuntimeError("exceptions requested before the assignment arrived")
        receivers = self.run.mis_receivers if self.accounting == "mis_phase" else self.run.all_receivers
        return set(receivers)


def coloring_player_from_mis(mis_algorithm: Algorithm, n: int, rounds: int, c: float = 3.0, seed: int = 0, accounting: str = "mis_phase") -> ColoringPlayer:
    return ColoringPlayer(mis_algorithm, rounds, c, seed, accounting)


# -- CDS hard network ------------------------------------------------------


@dataclass
class HardNetworkLayout:
    graph: DualGraph
    k: int
    cores: dict[int, int]
    point_sets: dict[int, tuple[int, ...]]
    connectors: dict[int, int]
    extenders: dict[int, int | None]
    cases: dict[int, int]
    join_probabilities: dict[int, dict[int, float]] = field(default_factory=dict)

    def point_set_of(self) -> dict[int, int]:
        return {u: h for h, ids in self.point_sets.items() for u in ids}

    def roles(self) -> dict:
        return {
            "kind": "cds-hard",
            "k": self.k,
            "parts": [
                {
                    "part": h,
                    "core": self.cores[h],
                    "point_set": list(self.point_sets[h]),
                    "connector": self.connectors[h],
                    "extender": self.extenders[h],
                    "case": self.cases[h],
                    "join_probabilities": {str(u): p for u, p in sorted(self.join_probabilities.get(h, {}).items())},
                }
                for h in sorted(self.cores)
            ],
        }


def _clique(ids: Iterable[int]) -> list[tuple[int, int]]:
    ids = sorted(ids)
    return [(a, b) for i, a in enumerate(ids) for b in ids[i + 1:]]


def build_cds_hard_network(cds_algorithm: Algorithm, n: int) -> HardNetworkLayout:
    """Network on which a short CDS run either over-joins or disconnects.

    Ids ``1..n`` are cut into ``k = floor(sqrt(n))`` consecutive parts (any
    remainder goes to the last part).  The smallest id of a part is its core;
    the rest is its point set.  A point set where every empty-history join
    probability is >= 1/2 becomes a clique hung off the core by its smallest
    id (case 1).  Otherwise the smallest id with probability < 1/2 is the
    connector, the largest remaining id the extender, and the path is
    clique - connector - extender - core (case 2).  Cores form a clique and
    ``G'`` is complete.
    """
    k = math.isqrt(n)
    if k < 3:
        raise ValueError("the hard network needs n >= 9")
    parts: dict[int, list[int]] = {}
    for h in range(1, k + 1):
        hi = h * k if h < k else n
        parts[h] = list(range((h - 1) * k + 1, hi + 1))
    cores, points, connectors, extenders, cases, probs = {}, {}, {}, {}, {}, {}
    edges: list[tuple[int, int]] = []
    for h, ids in parts.items():
        core = ids[0]
        pset = tuple(ids[1:])
        cores[h] = core
        points[h] = pset
        ph = {}
        for i in pset:
            p = float(cds_algorithm.out(i, frozenset(pset) - {i}, ()))
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"out-function gave {p} for id {i}")
            ph[i] = p
        probs[h] = ph
        low = [i for i in pset if ph[i] < 0.5]
        if not low:
            cases[h] = 1
            connectors[h] = min(pset)
            extenders[h] = None
            edges += _clique(pset)
            edges.append((connectors[h], core))
        else:
            cases[h] = 2
            conn = min(low)
            rest = [i for i in pset if i != conn]
            ext = max(rest)
            connectors[h] = conn
            extenders[h] = ext
            edges += _clique([conn] + [i for i in rest if i != ext])
            edges += [(conn, ext), (ext, core)]
    edges += _clique(cores.values())
    graph = DualGraph.with_complete_prime(n, edges)
    return HardNetworkLayout(graph, k, cores, points, connectors, extenders, cases, probs)


def check_hard_layout(layout: HardNetworkLayout, cds_algorithm: Algorithm | None = None) -> list[str]:
    """Structural problems with a hard network (empty list when sound)."""
    g = layout.graph
    adj = g.adjacency
    problems = []
    seen = sorted(u for h in layout.cores for u in (layout.cores[h],) + layout.point_sets[h])
    if seen != list(g.nodes):
        problems.append("ids are not partitioned into cores and point sets")
    core_set = set(layout.cores.values())
    for a in core_set:
        if not (core_set - {a}) <= adj[a]:
            problems.append(f"core {a} is not adjacent to every other core")
    for h, pset in layout.point_sets.items():
        core = layout.cores[h]
        if core != min((core,) + pset):
            problems.append(f"part {h}: core is not the smallest id")
        members = set(pset)
        conn, ext = layout.connectors[h], layout.extenders[h]
        # edges leaving the point set
        leaving = sorted((u, v) for u in members for v in adj[u] if v not in members)
        gate = conn if layout.cases[h] == 1 else ext
        if leaving != [(gate, core)]:
            problems.append(f"part {h}: point set leaves through {leaving}, expected only {(gate, core)}")
        clique = members if layout.cases[h] == 1 else members - {ext}
        for u in clique:
            if not (clique - {u}) <= adj[u]:
                problems.append(f"part {h}: {u} misses clique neighbours")
                break
        if layout.cases[h] == 2:
            if adj[ext] != frozenset({conn, core}):
                problems.append(f"part {h}: extender {ext} has neighbours {sorted(adj[ext])}")
            if cds_algorithm is not None:
                p = cds_algorithm.out(conn, frozenset(pset) - {conn}, ())
                if not p < 0.5:
                    problems.append(f"part {h}: case-2 connector {conn} has join probability {p}")
        elif cds_algorithm is not None:
            if any(cds_algorithm.out(i, frozenset(pset) - {i}, ()) < 0.5 for i in pset):
                problems.append(f"part {h}: case 1 with a join probability below 1/2")
    return problems


def silent_fraction(layout: HardNetworkLayout, receivers: Iterable[int]) -> float:
    """Fraction of point sets in which no node received anything."""
    where = layout.point_set_of()
    loud = {where[u] for u in receivers if u in where}
    return 1.0 - len(loud) / len(layout.point_sets)


# -- barbell / k-isolation -------------------------------------------------


def _half(k: int) -> int:
    if k < 2:
        raise ValueError("barbell needs k >= 2")
    return k // 2


def bridge(k: int, t: int) -> tuple[int, int]:
    """Bridge endpoints for target ``t``: ``t`` and its partner in the other clique.

    Ids ``1..h`` form one clique and ``h+1..k`` the other, ``h = k // 2``.
    Partner of ``i <= h`` is ``i + h``; of ``h < i <= 2h`` is ``i - h``; the
    extra id ``k`` of an odd ``k`` is bridged to ``h``.
    """
    h = _half(k)
    if not 1 <= t <= k:
        raise ValueError("target outside [k]")
    if t <= h:
        return (t, t + h)
    if t <= 2 * h:
        return (t - h, t)
    return (h, t)


def bridge_targets(k: int, i: int) -> list[int]:
    """Targets whose bridge touches node ``i``, ``i`` itself first."""
    out = [i]
    out += [t for t in range(1, k + 1) if t != i and i in bridge(k, t)]
    return out


def same_clique(k: int, a: int, b: int) -> bool:
    h = _half(k)
    return (a <= h) == (b <= h)


def barbell_graph(k: int, t: int) -> DualGraph:
    """Two cliques joined by the bridge of target ``t``; ``G'`` complete."""
    h = _half(k)
    edges = _clique(range(1, h + 1)) + _clique(range(h + 1, k + 1))
    edges.append(bridge(k, t))
    return DualGraph.with_complete_prime(k, edges)


class IsolationPlayerFromCDS:
    """k-isolation player that simulates a CDS algorithm on the hidden barbell.

    Passive knowledge, complete ``G'``, every unreliable edge on.  A round
    with a lone transmitter ``i`` costs the guesses ``bridge_targets(k, i)``;
    after ``f`` rounds every node that joined the CDS is guessed.
    """

    def __init__(self, cds_algorithm: Algorithm, f: int, seed: int = 0) -> None:
        self.algorithm = cds_algorithm
        self.f = f
        self.seed = seed
        self.transcript: list[RoundTranscript] = []
        self.guesses: list[int] = []
        self.joined: list[int] = []
        self.lone_rounds = 0

    def play(self, k: int):
        ex = Execution(k, self.algorithm, KnowledgeMode.PASSIVE, self.seed)
        for _ in range(self.f):
            r = ex.round + 1
            sent = ex.flip(ex.declare())
            receptions: dict[int, Reception] = {}
            if len(sent) == 1:
                (i, payload), = sent.items()
                self.lone_rounds += 1
                for t in bridge_targets(k, i):
                    self.guesses.append(t)
                    yield t
                # not a bridge endpoint: only its own clique is reliable
                receptions = {u: Reception(r, i, payload, same_clique(k, u, i)) for u in range(1, k + 1) if u != i}
            self.transcript.append(RoundTranscript(r, sent, ALL_UNRELIABLE, receptions))
            ex.deliver(receptions)
        outputs = ex.outputs()
        self.joined = sorted(u for u, b in outputs.items() if b)
        for u in self.joined:
            self.guesses.append(u)
            yield u


def isolation_player_from_cds(cds_algorithm: Algorithm, k: int, f: int, seed: int = 0) -> IsolationPlayerFromCDS:
    return IsolationPlayerFromCDS(cds_algorithm, f, seed)


# -- G_kappa / k-bit revealing --------------------------------------------

SET_SIZE = 5


def g_kappa_set(k: int, i: int) -> tuple[int, ...]:
    """Ids of the five-node set hanging off anchor ``i`` (anchors are ``1..k``)."""
    start = k + SET_SIZE * (i - 1) + 1
    return tuple(range(start, start + SET_SIZE))


def g_kappa_index(k: int, u: int) -> int:
    """Bit index a node belongs to: its anchor number or its set number."""
    return u if u <= k else (u - k - 1) // SET_SIZE + 1


def g_kappa_neighbors(k: int, u: int, bit: int) -> frozenset[int]:
    """Reliable neighbours of ``u`` given the bit of its own set."""
    i = g_kappa_index(k, u)
    members = g_kappa_set(k, i)
    if u <= k:
        nb = {members[0]}
        if u > 1:
            nb.add(u - 1)
        if u < k:
            nb.add(u + 1)
        return frozenset(nb)
    pos = members.index(u)
    if bit:
        nb = set(members) - {u}
    else:
        nb = {members[j] for j in (pos - 1, pos + 1) if 0 <= j < SET_SIZE}
    if pos == 0:
        nb.add(i)
    return frozenset(nb)


def build_g_kappa(kappa: Iterable[int]) -> DualGraph:
    """Anchor line 1..k; set ``i`` is a 5-line (bit 0) or 5-clique (bit 1) attached at its first node."""
    kappa = tuple(kappa)
    k = len(kappa)
    if k < 1:
        raise ValueError("kappa must be non-empty")
    edges = [(a, a + 1) for a in range(1, k)]
    for i, bit in enumerate(kappa, start=1):
        members = g_kappa_set(k, i)
        edges.append((i, members[0]))
        if bit:
            edges += _clique(members)
        else:
            edges += list(zip(members, members[1:]))
    return DualGraph.with_complete_prime(6 * k, edges)


def decode_kappa(k: int, joined: Iterable[int]) -> tuple[int, ...]:
    """Bit ``i`` is 1 when at most one node of set ``i`` joined, else 0."""
    joined = set(joined)
    return tuple(int(sum(u in joined for u in g_kappa_set(k, i)) <= 1) for i in range(1, k + 1))


class BitRevealPlayerFromMIS:
    """k-bit revealing player that simulates an MIS algorithm on the hidden G_kappa.

    One reveal per simulated round: the lone transmitter's set bit when
    exactly one node transmits, otherwise a throwaway reveal of bit 1.
    """

    def __init__(self, mis_algorithm: Algorithm, f: int, seed: int = 0) -> None:
        self.algorithm = mis_algorithm
        self.f = f
        self.seed = seed
        self.transcript: list[RoundTranscript] = []
        self.requests = 0
        self.joined: list[int] = []

    def play(self, k: int):
        n = 6 * k
        ex = Execution(n, self.algorithm, KnowledgeMode.PASSIVE, self.seed)
        for _ in range(self.f):
            r = ex.round + 1
            sent = ex.flip(ex.declare())
            receptions: dict[int, Reception] = {}
            if len(sent) == 1:
                (u, payload), = sent.items()
                self.requests += 1
                bit = yield Reveal(g_kappa_index(k, u))
                nb = g_kappa_neighbors(k, u, bit)
                receptions = {w: Reception(r, u, payload, w in nb) for w in range(1, n + 1) if w != u}
            else:
                self.requests += 1
                yield Reveal(1)
            self.transcript.append(RoundTranscript(r, sent, ALL_UNRELIABLE, receptions))
            ex.deliver(receptions)
        outputs = ex.outputs()
        self.joined = sorted(u for u, b in outputs.items() if b)
        yield Guess(decode_kappa(k, self.joined))


def bitreveal_player_from_mis(mis_algorithm: Algorithm, k: int, f: int, seed: int = 0) -> BitRevealPlayerFromMIS:
    return BitRevealPlayerFromMIS(mis_algorithm, f, seed)


def transcripts_agree(simulated: list[RoundTranscript], direct: list[RoundTranscript]) -> bool:
    """Round-by-round equality of traffic over the simulated prefix."""
    if len(simulated) > len(direct):
        return False
    return all(a.same_traffic(b) for a, b in zip(simulated, direct))
