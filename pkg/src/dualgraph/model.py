"""Dual graph networks and the synchronous round engine.

A network is a pair of graphs on the node ids ``1..n``: the reliable graph
``G`` and the larger graph ``G'`` whose extra edges an adversary switches on
and off round by round.  Reception follows the classical radio rule: a
listening node hears a message iff exactly one of its neighbours in the
round's topology transmits.  There is no collision detection.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping, Protocol, Sequence

import numpy as np

from .seeding import derive_seed, uniforms

if TYPE_CHECKING:
    from .adversary import Adversary

Edge = tuple[int, int]


class GraphError(ValueError):
    """Raised for malformed graphs or edge choices outside ``E' \\ E``."""


def edge(u: int, v: int) -> Edge:
    """Canonical (sorted) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


def _normalise(edges: Iterable[Sequence[int]], n: int, what: str) -> frozenset[Edge]:
    out = set()
    for pair in edges:
        u, v = (int(x) for x in pair)
        if u == v:
            raise GraphError(f"self-loop on {u} in {what} edges")
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphError(f"{what} edge {(u, v)} has an endpoint outside [1, {n}]")
        e = edge(u, v)
        if e in out:
            raise GraphError(f"duplicate {what} edge {e}")
        out.add(e)
    return frozenset(out)


class _AllUnreliable:
    """Sentinel choice meaning "every edge of E' \\ E"."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ALL_UNRELIABLE"

    def __reduce__(self):
        return (_AllUnreliable, ())


ALL_UNRELIABLE = _AllUnreliable()
"""Adversary choice that includes all unreliable edges without materialising them."""


class DualGraph:
    """Reliable graph ``G`` plus the extra unreliable edges of ``G'``.

    ``complete_prime=True`` declares ``G'`` complete; the unreliable edge set
    is then the complement of ``G`` and is only materialised on demand, which
    keeps 1000-node reductions cheap.
    """

    def __init__(
        self,
        n: int,
        reliable: Iterable[Sequence[int]] = (),
        unreliable: Iterable[Sequence[int]] = (),
        *,
        embedding: Sequence[Sequence[float]] | None = None,
        gamma: float | None = None,
        complete_prime: bool = False,
    ) -> None:
        if n < 0:
            raise GraphError("n must be non-negative")
        self.n = int(n)
        self.reliable_edges = _normalise(reliable, self.n, "reliable")
        self.complete_prime = bool(complete_prime)
        if self.complete_prime:
            extra = list(unreliable)
            if extra:
                raise GraphError("complete_prime graphs take no explicit unreliable edges")
        else:
            un = _normalise(unreliable, self.n, "unreliable")
            clash = un & self.reliable_edges
            if clash:
                raise GraphError(f"edge {min(clash)} is both reliable and unreliable")
            self.__dict__["unreliable_extra_edges"] = un
        if embedding is not None:
            embedding = tuple((float(p[0]), float(p[1])) for p in embedding)
            if len(embedding) != self.n:
                raise GraphError("embedding must give one point per node")
        self.embedding = embedding
        if gamma is not None and gamma < 1:
            raise GraphError("gamma must be >= 1")
        self.gamma = None if gamma is None else float(gamma)

    @classmethod
    def with_complete_prime(cls, n: int, reliable: Iterable[Sequence[int]], **kw) -> "DualGraph":
        return cls(n, reliable, complete_prime=True, **kw)

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def unreliable_extra_edges(self) -> frozenset[Edge]:
        # only reached for complete_prime graphs
        rel = self.reliable_edges
        return frozenset(
            (u, v) for u in range(1, self.n + 1) for v in range(u + 1, self.n + 1) if (u, v) not in rel
        )

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        """Reliable neighbour sets."""
        adj: dict[int, set[int]] = {u: set() for u in self.nodes}
        for u, v in self.reliable_edges:
            adj[u].add(v)
            adj[v].add(u)
        return {u: frozenset(s) for u, s in adj.items()}

    def neighbors(self, u: int) -> frozenset[int]:
        return self.adjacency[u]

    @cached_property
    def _reliable_arrays(self) -> list[np.ndarray]:
        arrs = [np.empty(0, dtype=np.int64)]
        arrs += [np.fromiter(sorted(self.adjacency[u]), dtype=np.int64) for u in self.nodes]
        return arrs

    @cached_property
    def _prime_arrays(self) -> list[np.ndarray]:
        adj: dict[int, set[int]] = {u: set(self.adjacency[u]) for u in self.nodes}
        for u, v in self.unreliable_extra_edges:
            adj[u].add(v)
            adj[v].add(u)
        arrs = [np.empty(0, dtype=np.int64)]
        arrs += [np.fromiter(sorted(adj[u]), dtype=np.int64) for u in self.nodes]
        return arrs

    def expand(self, choice) -> frozenset[Edge]:
        """Materialise an adversary choice as an explicit edge set."""
        if choice is ALL_UNRELIABLE:
            return self.unreliable_extra_edges
        return frozenset(choice)

    def check_choice(self, choice) -> None:
        if choice is ALL_UNRELIABLE:
            return
        if self.complete_prime:
            bad = [e for e in choice if e in self.reliable_edges or e[0] == e[1] or not (1 <= e[0] < e[1] <= self.n)]
        else:
            bad = [e for e in choice if e not in self.unreliable_extra_edges]
        if bad:
            raise GraphError(f"adversary edge {sorted(bad)[0]} is not in E' \\ E")

    # -- serialisation -------------------------------------------------
    def to_json(self) -> dict:
        doc: dict = {
            "n": self.n,
            "reliable": [list(e) for e in sorted(self.reliable_edges)],
            # a complete G' is stored by name rather than as ~n^2/2 edges
            "unreliable": "complement" if self.complete_prime else [list(e) for e in sorted(self.unreliable_extra_edges)],
        }
        if self.embedding is not None:
            doc["embedding"] = [list(p) for p in self.embedding]
        if self.gamma is not None:
            doc["gamma"] = self.gamma
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "DualGraph":
        un = doc.get("unreliable", ())
        complete = un == "complement"
        return cls(
            doc["n"],
            doc.get("reliable", ()),
            () if complete else un,
            embedding=doc.get("embedding"),
            gamma=doc.get("gamma"),
            complete_prime=complete,
        )

    def save(self, path: str | Path, **extra) -> None:
        doc = self.to_json()
        doc.update(extra)
        Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "DualGraph":
        return cls.from_json(json.loads(Path(path).read_text()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DualGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.reliable_edges == other.reliable_edges
            and self.unreliable_extra_edges == other.unreliable_extra_edges
            and self.embedding == other.embedding
            and self.gamma == other.gamma
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"DualGraph(n={self.n}, |E|={len(self.reliable_edges)}, complete_prime={self.complete_prime})"


class KnowledgeMode(str, enum.Enum):
    ADVANCE = "advance"
    PASSIVE = "passive"


@dataclass(frozen=True)
class Reception:
    round: int
    sender: int
    payload: bytes
    reliable: bool


History = tuple[Reception, ...]


@dataclass
class RoundTranscript:
    round: int
    broadcasts: dict[int, bytes]
    adversary_edges: object
    receptions: dict[int, Reception]

    def same_traffic(self, other: "RoundTranscript") -> bool:
        """Equal broadcasts and receptions (adversary edges ignored)."""
        return (
            self.round == other.round
            and self.broadcasts == other.broadcasts
            and self.receptions == other.receptions
        )

    def to_json(self) -> dict:
        if self.adversary_edges is ALL_UNRELIABLE:
            adv: object = "all"
        else:
            adv = [list(e) for e in sorted(self.adversary_edges)]
        return {
            "round": self.round,
            "broadcasts": [[u, self.broadcasts[u].hex()] for u in sorted(self.broadcasts)],
            "adversary_edges": adv,
            "receptions": [
                [u, r.sender, r.payload.hex(), r.reliable] for u, r in sorted(self.receptions.items())
            ],
        }


def write_transcript(transcript: Iterable[RoundTranscript], path: str | Path) -> None:
    """JSON Lines, one object per round."""
    with open(path, "w") as fh:
        for rt in transcript:
            fh.write(json.dumps(rt.to_json(), sort_keys=True) + "\n")


def resolve_round(
    graph: DualGraph,
    adversary_edges,
    broadcasters: Mapping[int, bytes],
    round: int = 1,
) -> dict[int, Reception]:
    """Who hears what in one round.

    The topology is ``E`` plus ``adversary_edges``.  Node ``u`` receives from
    ``v`` iff ``u`` is silent, ``v`` transmits and ``v`` is the only
    transmitter among ``u``'s neighbours.  Nodes absent from the result hear
    nothing (collision and silence look the same).
    """
    n = graph.n
    for v in broadcasters:
        if not 1 <= v <= n:
            raise GraphError(f"unknown broadcaster id {v}")
    graph.check_choice(adversary_edges)
    if not broadcasters:
        return {}
    senders = np.fromiter(broadcasters, dtype=np.int64, count=len(broadcasters))

    if adversary_edges is ALL_UNRELIABLE and graph.complete_prime:
        # complete topology: one transmitter reaches everyone, two jam everyone
        if len(senders) != 1:
            return {}
        v = int(senders[0])
        payload = broadcasters[v]
        adj = graph.adjacency[v]
        return {
            u: Reception(round, v, payload, u in adj) for u in range(1, n + 1) if u != v
        }

    arrays = graph._prime_arrays if adversary_edges is ALL_UNRELIABLE else graph._reliable_arrays
    hits = np.concatenate([arrays[v] for v in senders])
    weights = np.concatenate([np.full(len(arrays[v]), v, dtype=np.int64) for v in senders])
    counts = np.bincount(hits, minlength=n + 1)
    who = np.bincount(hits, weights=weights, minlength=n + 1)

    if adversary_edges is not ALL_UNRELIABLE and adversary_edges:
        counts = counts.copy()
        who = who.copy()
        is_sender = set(broadcasters)
        for a, b in adversary_edges:
            if a in is_sender:
                counts[b] += 1
                who[b] += a
            if b in is_sender:
                counts[a] += 1
                who[a] += b

    counts[senders] = 0
    receivers = np.flatnonzero(counts == 1)
    rel = graph.adjacency
    out = {}
    for u in receivers.tolist():
        v = int(who[u])
        out[u] = Reception(round, v, broadcasters[v], v in rel[u])
    return out


class NodeProcess(Protocol):
    """Per-node behaviour.  ``intent`` is asked before any coin is flipped."""

    def intent(self, round: int) -> tuple[float, bytes]: ...

    def receive(self, round: int, reception: Reception | None) -> None: ...


class Algorithm(Protocol):
    name: str

    def process(self, node_id: int, n: int, neighbors: frozenset[int] | None) -> NodeProcess: ...

    def out(self, node_id: int, neighbors: frozenset[int] | None, history: History) -> float: ...


class Coins:
    """Seeded coins for one execution.

    The broadcast coin of node ``u`` in round ``r`` is element ``u-1`` of a
    Philox stream keyed by ``(seed, "bcast", r)``; output coins come from the
    ``(seed, "out")`` stream.
    """

    def __init__(self, seed: int) -> None:
        self.seed = int(seed)

    def broadcast(self, round: int, n: int) -> np.ndarray:
        return uniforms(derive_seed(self.seed, "bcast", round), n)

    def output(self, n: int) -> np.ndarray:
        return uniforms(derive_seed(self.seed, "out"), n)


def _check_probability(p: float, what: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{what} returned probability {p} outside [0, 1]")
    return p


class Execution:
    """Step-wise driver for ``n`` node processes.

    ``run_execution`` uses it with the real reception rule; the reduction
    players drive it with receptions they simulate themselves.
    """

    def __init__(
        self,
        n: int,
        algorithm: Algorithm,
        mode: KnowledgeMode | str,
        seed: int,
        neighbors: Mapping[int, frozenset[int]] | None = None,
        coins: Coins | None = None,
    ) -> None:
        self.n = n
        self.algorithm = algorithm
        self.mode = KnowledgeMode(mode)
        if self.mode is KnowledgeMode.ADVANCE and neighbors is None:
            raise ValueError("advance knowledge needs the reliable neighbour sets")
        self.known = {u: (neighbors[u] if self.mode is KnowledgeMode.ADVANCE else None) for u in range(1, n + 1)}
        self.coins = coins if coins is not None else Coins(seed)
        self.processes = {u: algorithm.process(u, n, self.known[u]) for u in range(1, n + 1)}
        self.histories: dict[int, list[Reception]] = {u: [] for u in range(1, n + 1)}
        self.round = 0

    def declare(self) -> dict[int, tuple[float, bytes]]:
        """Phase one of round ``self.round + 1``: every node states (p, payload)."""
        r = self.round + 1
        out = {}
        for u, proc in self.processes.items():
            p, payload = proc.intent(r)
            out[u] = (_check_probability(p, f"{self.algorithm.name} broadcast"), bytes(payload))
        return out

    def flip(self, declared: Mapping[int, tuple[float, bytes]]) -> dict[int, bytes]:
        """Phase two: resolve the broadcast coins."""
        draws = self.coins.broadcast(self.round + 1, self.n)
        return {u: payload for u, (p, payload) in declared.items() if p > 0.0 and draws[u - 1] < p}

    def deliver(self, receptions: Mapping[int, Reception]) -> None:
        self.round += 1
        r = self.round
        for u, proc in self.processes.items():
            rec = receptions.get(u)
            if rec is not None:
                self.histories[u].append(rec)
            proc.receive(r, rec)

    def join_probabilities(self) -> dict[int, float]:
        return {
            u: _check_probability(
                self.algorithm.out(u, self.known[u], tuple(self.histories[u])),
                f"{self.algorithm.name}.out",
            )
            for u in range(1, self.n + 1)
        }

    def outputs(self) -> dict[int, int]:
        probs = self.join_probabilities()
        draws = self.coins.output(self.n)
        return {u: int(draws[u - 1] < p) for u, p in probs.items()}


@dataclass
class ExecutionResult:
    transcript: list[RoundTranscript]
    outputs: dict[int, int]
    histories: dict[int, History] = field(default_factory=dict)

    @property
    def joined(self) -> frozenset[int]:
        return frozenset(u for u, b in self.outputs.items() if b)


def run_execution(
    graph: DualGraph,
    adversary: "Adversary",
    algorithm: Algorithm,
    knowledge_mode: KnowledgeMode | str,
    rounds: int,
    master_seed: int,
    *,
    coins: Coins | None = None,
) -> ExecutionResult:
    """Run ``rounds`` rounds and then draw every node's 0/1 output."""
    from .adversary import AdversaryView

    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    ex = Execution(graph.n, algorithm, knowledge_mode, master_seed, graph.adjacency, coins=coins)
    transcript: list[RoundTranscript] = []
    for _ in range(rounds):
        r = ex.round + 1
        declared = ex.declare()
        view = AdversaryView(graph, r, tuple(transcript), {u: p for u, (p, _) in declared.items()})
        if adversary.sees_coins:
            broadcasters = ex.flip(declared)
            choice = adversary.choose(view, broadcasters)
        else:
            choice = adversary.choose(view)
            broadcasters = ex.flip(declared)
        receptions = resolve_round(graph, choice, broadcasters, r)
        ex.deliver(receptions)
        transcript.append(RoundTranscript(r, broadcasters, choice, receptions))
    outputs = ex.outputs()
    return ExecutionResult(transcript, outputs, {u: tuple(h) for u, h in ex.histories.items()})
