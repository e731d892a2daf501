"""MIS / CDS verification, a brute-force minimum CDS, and geometric dual graphs."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .model import DualGraph, GraphError

MIN_CDS_LIMIT = 20


@dataclass(frozen=True)
class Violation:
    kind: str  # "independence" | "uncovered" | "disconnected" | "empty" | "unknown-id"
    witness: tuple

    def to_json(self) -> dict:
        return {"kind": self.kind, "witness": list(self.witness)}


@dataclass
class StructureReport:
    valid: bool
    violations: list[Violation] = field(default_factory=list)
    size: int = 0
    approx_ratio: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "size": self.size,
            "violations": [v.to_json() for v in self.violations],
            "approx_ratio": None if self.approx_ratio is None else str(self.approx_ratio),
        }


def _unknown(graph: DualGraph, members: set[int]) -> list[Violation]:
    return [Violation("unknown-id", (u,)) for u in sorted(members) if not 1 <= u <= graph.n]


def _uncovered(graph: DualGraph, members: set[int]) -> list[Violation]:
    adj = graph.adjacency
    return [
        Violation("uncovered", (u,))
        for u in graph.nodes
        if u not in members and not (adj[u] & members)
    ]


def _components(adj, members: set[int]) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for start in sorted(members):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v in members and v not in seen:
                    seen.add(v)
                    comp.append(v)
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


def verify_mis(graph: DualGraph, S: Iterable[int]) -> StructureReport:
    """Check that ``S`` is independent and dominating in the reliable graph."""
    members = set(S)
    violations = _unknown(graph, members)
    members &= set(graph.nodes)
    adj = graph.adjacency
    for u in sorted(members):
        for v in sorted(adj[u]):
            if u < v and v in members:
                violations.append(Violation("independence", (u, v)))
    violations += _uncovered(graph, members)
    return StructureReport(not violations, violations, len(members))


def verify_cds(graph: DualGraph, C: Iterable[int]) -> StructureReport:
    """Check that ``C`` dominates the reliable graph and induces a connected subgraph."""
    members = set(C)
    violations = _unknown(graph, members)
    members &= set(graph.nodes)
    if graph.n >= 1 and not members:
        violations.append(Violation("empty", ()))
    violations += _uncovered(graph, members)
    comps = _components(graph.adjacency, members)
    for a, b in zip(comps, comps[1:]):
        violations.append(Violation("disconnected", (a[0], b[0])))
    return StructureReport(not violations, violations, len(members))


def _masks(graph: DualGraph) -> list[int]:
    adj = graph.adjacency
    return [sum(1 << (v - 1) for v in adj[u]) for u in graph.nodes]


def _connected(mask: int, nbr: list[int]) -> bool:
    start = mask & -mask
    reach = start
    frontier = start
    while frontier:
        grow = 0
        f = frontier
        while f:
            low = f & -f
            grow |= nbr[low.bit_length() - 1]
            f ^= low
        grow &= mask & ~reach
        reach |= grow
        frontier = grow
    return reach == mask


def min_cds_bruteforce(graph: DualGraph) -> int:
    """Exact minimum CDS size by enumerating subsets in increasing size.

    Only feasible for ``n <= 20``.  A single node is its own CDS; an empty
    graph has minimum 0.  Returns ``math.inf`` if ``G`` is disconnected (no
    CDS exists).
    """
    n = graph.n
    if n > MIN_CDS_LIMIT:
        raise ValueError(f"min_cds_bruteforce is limited to n <= {MIN_CDS_LIMIT} (got n={n})")
    if n == 0:
        return 0
    nbr = _masks(graph)
    closed = [m | (1 << i) for i, m in enumerate(nbr)]
    full = (1 << n) - 1
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            cover = 0
            mask = 0
            for i in combo:
                cover |= closed[i]
                mask |= 1 << i
            if cover == full and _connected(mask, nbr):
                found = [i + 1 for i in combo]
                assert verify_cds(graph, found).valid
                return size
    return math.inf  # type: ignore[return-value]


def approx_ratio(graph: DualGraph, C: Iterable[int]) -> Fraction:
    best = min_cds_bruteforce(graph)
    if best in (0, math.inf):
        raise ValueError("approximation ratio undefined for this graph")
    return Fraction(len(set(C)), best)


def verify_cds_with_ratio(graph: DualGraph, C: Iterable[int]) -> StructureReport:
    members = set(C)
    report = verify_cds(graph, members)
    if report.valid and graph.n <= MIN_CDS_LIMIT:
        report.approx_ratio = approx_ratio(graph, members)
    return report


# -- geometry -------------------------------------------------------------

UnreliableRule = Callable[[int, int, float], bool]


def _all_grey(u: int, v: int, d: float) -> bool:
    return True


def geometric_dualgraph(
    points: Sequence[Sequence[float]],
    gamma: float,
    unreliable_rule: UnreliableRule | None = None,
) -> DualGraph:
    """Dual graph of a point set: ``d <= 1`` reliable, ``1 < d <= gamma`` grey.

    Grey-zone pairs become unreliable edges when ``unreliable_rule(u, v, d)``
    says so (default: all of them).  Pairs farther than ``gamma`` get no edge.
    """
    if gamma < 1:
        raise GraphError("gamma must be >= 1")
    rule = unreliable_rule or _all_grey
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    if len({tuple(p) for p in pts.tolist()}) != n:
        raise GraphError("points must be distinct")
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    reliable, unreliable = [], []
    for i in range(n):
        for j in range(i + 1, n):
            d = float(dist[i, j])
            if d <= 1.0:
                reliable.append((i + 1, j + 1))
            elif d <= gamma and rule(i + 1, j + 1, d):
                unreliable.append((i + 1, j + 1))
    return DualGraph(n, reliable, unreliable, embedding=pts.tolist(), gamma=gamma)


@dataclass(frozen=True)
class GeographicCheck:
    ok: bool
    witness: tuple[int, int] | None = None
    distance: float | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_geographic(graph: DualGraph, gamma: float | None = None) -> GeographicCheck:
    """Does the embedding witness the geographic constraint?

    Every pair at distance <= 1 must be reliable and no pair farther than
    ``gamma`` may be an edge of ``G'``.
    """
    if graph.embedding is None:
        raise ValueError("graph has no embedding")
    g = gamma if gamma is not None else graph.gamma
    if g is None:
        raise ValueError("no gamma given")
    pts = np.asarray(graph.embedding, dtype=float)
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    rel = graph.reliable_edges
    close = np.argwhere(np.triu(dist <= 1.0, k=1))
    for i, j in close.tolist():
        if (i + 1, j + 1) not in rel:
            return GeographicCheck(False, (i + 1, j + 1), float(dist[i, j]), "close pair not reliable")
    far = np.argwhere(np.triu(dist > g, k=1))
    if graph.complete_prime:
        if len(far):
            i, j = far[0].tolist()
            return GeographicCheck(False, (i + 1, j + 1), float(dist[i, j]), "far pair in G'")
        return GeographicCheck(True)
    prime = rel | graph.unreliable_extra_edges
    for i, j in far.tolist():
        if (i + 1, j + 1) in prime:
            return GeographicCheck(False, (i + 1, j + 1), float(dist[i, j]), "far pair in G'")
    return GeographicCheck(True)
