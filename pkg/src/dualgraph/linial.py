"""Neighbourhood view graphs B(t, m) and an exact chromatic-number solver.

A vertex of B(t, m) is a tuple of ``2t+1`` distinct ids from ``[m]`` read
clockwise (counter-clockwise neighbours first, then the centre, then the
clockwise side).  Two views are adjacent when one is the other shifted by
one position along a ring: ``(x1..x_{2t+1})`` and ``(y, x1..x_{2t})`` with
``y != x_{2t+1}``.  A proper colouring of B(t, m) is exactly a ``t``-round
colouring rule for oriented rings with ids from ``[m]``.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Sequence

View = tuple[int, ...]


@dataclass
class ViewGraph:
    t: int
    m: int
    vertices: list[View]
    index: dict[View, int]
    adjacency: list[list[int]]

    @property
    def edges(self) -> list[tuple[View, View]]:
        return [
            (self.vertices[i], self.vertices[j])
            for i, nbrs in enumerate(self.adjacency)
            for j in nbrs
            if i < j
        ]

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def relabel(self, mapping: Mapping[int, int]) -> "ViewGraph":
        """Apply an id bijection to every view; adjacency is carried over."""
        verts = [tuple(mapping[x] for x in v) for v in self.vertices]
        return ViewGraph(self.t, self.m, verts, {v: i for i, v in enumerate(verts)}, self.adjacency)


def build_view_graph(t: int, m: int) -> ViewGraph:
    """Construct B(t, m).  ``m == 2t+1`` is accepted and has no edges."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if m <= 2 * t:
        raise ValueError(f"B({t},{m}) has no vertices: need m >= 2t+1")
    width = 2 * t + 1
    vertices = list(itertools.permutations(range(1, m + 1), width))
    index = {v: i for i, v in enumerate(vertices)}
    adjacency: list[list[int]] = [[] for _ in vertices]
    for i, v in enumerate(vertices):
        prefix = v[:-1]
        used = set(v)
        for y in range(1, m + 1):
            # y must differ from x_{2t+1} and keep the shifted view distinct
            if y in used:
                continue
            j = index[(y,) + prefix]
            adjacency[i].append(j)
            adjacency[j].append(i)
    for a in adjacency:
        a.sort()
    return ViewGraph(t, m, vertices, index, adjacency)


class ColoringBudgetExceeded(RuntimeError):
    """The exact search hit its node or time budget before deciding."""

    def __init__(self, message: str, frontier: dict) -> None:
        super().__init__(message)
        self.frontier = frontier


@dataclass
class ChromaticResult:
    chi: int
    coloring: list[int]
    nodes_searched: dict[int, int] = field(default_factory=dict)
    # how chi - 1 was ruled out, e.g. "exhaustive" or "induced B(1,7)"
    lower_bound_source: str = "exhaustive"

    def proper(self, adjacency: Sequence[Sequence[int]]) -> bool:
        return all(self.coloring[i] != self.coloring[j] for i, nb in enumerate(adjacency) for j in nb)


def k_colorable(
    adjacency: Sequence[Sequence[int]],
    k: int,
    max_nodes: int | None = None,
    deadline: float | None = None,
) -> tuple[list[int] | None, int]:
    """DSATUR backtracking decision: a proper ``k``-colouring or ``None``.

    Colours are 0-based.  A branch may only open the next unused colour,
    which removes colour-permutation symmetry.  Returns the colouring (or
    None) and the number of search nodes expanded.
    """
    n = len(adjacency)
    if n == 0:
        return [], 0
    if k <= 0:
        return None, 0
    color = [-1] * n
    # forbid[v][c] = number of coloured neighbours of v using colour c
    forbid = [[0] * k for _ in range(n)]
    sat = [0] * n
    degree = [len(a) for a in adjacency]
    uncolored = set(range(n))
    expanded = 0

    def assign(v: int, c: int) -> None:
        color[v] = c
        uncolored.discard(v)
        for w in adjacency[v]:
            row = forbid[w]
            if row[c] == 0:
                sat[w] += 1
            row[c] += 1

    def unassign(v: int) -> None:
        c = color[v]
        color[v] = -1
        uncolored.add(v)
        for w in adjacency[v]:
            row = forbid[w]
            row[c] -= 1
            if row[c] == 0:
                sat[w] -= 1

    def pick() -> int:
        return max(uncolored, key=lambda v: (sat[v], degree[v], -v))

    # explicit stack of (vertex, candidate colours, position)
    stack: list[list] = []
    used = 0
    used_stack: list[int] = []
    v = pick()
    cands = [c for c in range(min(k, used + 1)) if forbid[v][c] == 0]
    stack.append([v, cands, 0])
    while stack:
        frame = stack[-1]
        v, cands, pos = frame
        if color[v] != -1:
            unassign(v)
            used = used_stack.pop()
        if pos >= len(cands):
            stack.pop()
            continue
        c = cands[pos]
        frame[2] = pos + 1
        expanded += 1
        if max_nodes is not None and expanded > max_nodes:
            raise ColoringBudgetExceeded(f"node budget {max_nodes} exhausted at k={k}", {"k": k, "nodes": expanded})
        if deadline is not None and expanded % 4096 == 0 and time.monotonic() > deadline:
            raise ColoringBudgetExceeded(f"time budget exhausted at k={k}", {"k": k, "nodes": expanded})
        used_stack.append(used)
        assign(v, c)
        used = max(used, c + 1)
        if not uncolored:
            return list(color), expanded
        w = pick()
        if sat[w] >= k:
            continue  # dead end; next loop iteration undoes v
        wc = [x for x in range(min(k, used + 1)) if forbid[w][x] == 0]
        if not wc:
            continue
        stack.append([w, wc, 0])
    return None, expanded


def tabu_coloring(
    adjacency: Sequence[Sequence[int]],
    k: int,
    seed: int = 0,
    max_iters: int = 50_000,
) -> list[int] | None:
    """Tabu local search for a proper ``k``-colouring; ``None`` when it gives up.

    Only ever used to find colourings.  A ``None`` proves nothing.
    """
    n = len(adjacency)
    if n == 0:
        return []
    if k <= 0:
        return None
    rng = random.Random(seed)
    col = [rng.randrange(k) for _ in range(n)]
    gamma = [[0] * k for _ in range(n)]
    for v in range(n):
        for w in adjacency[v]:
            gamma[v][col[w]] += 1
    conflicts = sum(gamma[v][col[v]] for v in range(n)) // 2
    tabu: dict[tuple[int, int], int] = {}
    for it in range(max_iters):
        if conflicts == 0:
            return col
        best, best_delta = None, None
        for v in range(n):
            gv, cv = gamma[v], col[v]
            if gv[cv] == 0:
                continue
            for c in range(k):
                if c == cv:
                    continue
                d = gv[c] - gv[cv]
                # aspiration: a tabu move is allowed if it solves the instance
                if tabu.get((v, c), -1) > it and conflicts + d > 0:
                    continue
                if best_delta is None or d < best_delta or (d == best_delta and rng.random() < 0.3):
                    best, best_delta = (v, c), d
        if best is None:
            continue
        v, c = best
        old = col[v]
        col[v] = c
        conflicts += best_delta
        for w in adjacency[v]:
            gamma[w][old] -= 1
            gamma[w][c] += 1
        tabu[(v, old)] = it + int(0.6 * conflicts) + rng.randrange(10)
    return None


def chromatic_number_exact(
    adjacency: Sequence[Sequence[int]],
    limit: int | None = None,
    max_nodes: int | None = None,
    time_budget: float | None = None,
    lower_bound: int = 1,
    lower_bound_source: str = "exhaustive",
    heuristic_iters: int = 0,
) -> ChromaticResult:
    """Exact chromatic number by deciding k-colourability for k = lower_bound, ...

    The answer comes with a proper colouring at ``chi``; ``chi - 1`` is ruled
    out either by an exhausted search or, when ``chi == lower_bound``, by the
    caller's certificate (``lower_bound_source``).  ``heuristic_iters > 0``
    tries tabu search before each exhaustive decision.  ``limit`` caps the
    colours tried; ``max_nodes`` and ``time_budget`` (seconds, whole call)
    bound the search.
    """
    n = len(adjacency)
    if n == 0:
        return ChromaticResult(0, [])
    deadline = None if time_budget is None else time.monotonic() + time_budget
    searched: dict[int, int] = {}
    top = limit if limit is not None else n
    for k in range(max(1, lower_bound), top + 1):
        source = lower_bound_source if k == lower_bound else "exhaustive"
        if heuristic_iters > 0:
            col = tabu_coloring(adjacency, k, seed=k, max_iters=heuristic_iters)
            if col is not None:
                searched[k] = 0
                return ChromaticResult(k, col, searched, source)
        try:
            col, nodes = k_colorable(adjacency, k, max_nodes, deadline)
        except ColoringBudgetExceeded as exc:
            exc.frontier["lower_bound"] = k
            exc.frontier["searched"] = searched
            raise
        searched[k] = nodes
        if col is not None:
            return ChromaticResult(k, col, searched, source)
    raise ColoringBudgetExceeded(f"chromatic number exceeds limit {limit}", {"lower_bound": top + 1, "searched": searched})


def view_graph_chromatic_numbers(
    t: int,
    m_max: int,
    time_budget: float | None = None,
    heuristic_iters: int = 50_000,
) -> dict[int, ChromaticResult]:
    """chi(B(t, m)) for every m from 2t+1 to ``m_max``.

    B(t, m-1) is the induced subgraph of B(t, m) on views avoiding id m, so
    chi(B(t, m-1)) is a certified lower bound for chi(B(t, m)) and the
    search for m starts there.
    """
    out: dict[int, ChromaticResult] = {}
    lb, src = 1, "exhaustive"
    deadline = None if time_budget is None else time.monotonic() + time_budget
    for m in range(2 * t + 1, m_max + 1):
        adj = build_view_graph(t, m).adjacency
        left = None if deadline is None else max(0.0, deadline - time.monotonic())
        res = chromatic_number_exact(adj, time_budget=left, lower_bound=lb, lower_bound_source=src, heuristic_iters=heuristic_iters)
        out[m] = res
        if res.chi > lb or res.lower_bound_source == "exhaustive":
            src = f"induced B({t},{m})"
        lb = res.chi
    return out


def adjacency_from_edges(n: int, edges: Sequence[tuple[int, int]]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    return adj


def find_monochromatic_edge(
    view_graph: ViewGraph, coloring: Callable[[View], Hashable] | Mapping[View, Hashable]
) -> tuple[View, View] | None:
    """Some adjacent pair of views with equal colours, or ``None`` if proper.

    The pair is returned as ``(v1, v2)`` with ``v2`` the shift of ``v1``, i.e.
    ``v1 = (x1, x2, x3)`` and ``v2 = (y, x1, x2)``.
    """
    if view_graph.t != 1:
        raise ValueError("find_monochromatic_edge is defined for t = 1")
    get = coloring.__getitem__ if isinstance(coloring, Mapping) else coloring
    colors = []
    for v in view_graph.vertices:
        try:
            colors.append(get(v))
        except KeyError:
            raise ValueError(f"colouring is partial: no colour for {v}") from None
    verts = view_graph.vertices
    for i, nbrs in enumerate(view_graph.adjacency):
        for j in nbrs:
            if i < j and colors[i] == colors[j]:
                a, b = verts[i], verts[j]
                if b[1:] == a[:-1]:
                    return a, b
                return b, a
    return None
