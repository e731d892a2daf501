"""Referees and baseline players for the three guessing games.

* selective ring colouring: a triple colouring committed before the ring's id
  assignment is known must colour the ring properly up to ``g(n)`` deleted
  exceptions;
* k-isolation: find a uniformly random target in ``[k]`` one guess per round;
* k-bit revealing: learn one bit of a random ``k``-bit string per round, then
  guess the whole string.

Players only ever see referee responses; the referee's randomness lives in
its own seeded stream.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Generator, Iterable, Protocol, Sequence

from scipy.stats import binomtest

from .seeding import Stream, derive_seed

Triple = tuple[int, int, int]


# -- selective ring colouring ---------------------------------------------


class TripleColoring:
    """A total map from ordered distinct triples over ``[n]`` to {1, 2, 3}.

    Stored lazily as a function; ``seed`` records where its randomness came
    from, when there is any.
    """

    def __init__(self, n: int, fn: Callable[[int, int, int], int], seed: int | None = None) -> None:
        self.n = n
        self.fn = fn
        self.seed = seed

    def __call__(self, i: int, j: int, k: int) -> int:
        if len({i, j, k}) != 3 or not all(1 <= x <= self.n for x in (i, j, k)):
            raise ValueError(f"{(i, j, k)} is not an ordered triple of distinct ids from [{self.n}]")
        c = self.fn(i, j, k)
        if c not in (1, 2, 3):
            raise ValueError(f"colour {c!r} for {(i, j, k)} is not in {{1, 2, 3}}")
        return c

    def triples(self) -> Iterable[Triple]:
        return itertools.permutations(range(1, self.n + 1), 3)

    def materialize(self) -> dict[Triple, int]:
        return {t: self(*t) for t in self.triples()}

    @classmethod
    def constant(cls, n: int, color: int = 1) -> "TripleColoring":
        return cls(n, lambda i, j, k: color)


@dataclass(frozen=True)
class RingAssignment:
    """``labels[i-1]`` is the id of ring position ``u_i``; ``u_{i+1}`` is clockwise of ``u_i``."""

    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.labels) != list(range(1, len(self.labels) + 1)):
            raise ValueError("ring assignment must be a bijection onto [n]")

    @property
    def n(self) -> int:
        return len(self.labels)

    def __call__(self, position: int) -> int:
        return self.labels[(position - 1) % self.n]

    def triple(self, position: int) -> Triple:
        """(counter-clockwise id, own id, clockwise id) of ``u_position``."""
        return (self(position - 1), self(position), self(position + 1))

    def oriented_neighbors(self) -> dict[int, tuple[int, int]]:
        """id -> (left/counter-clockwise id, right/clockwise id)."""
        return {self(p): (self(p - 1), self(p + 1)) for p in range(1, self.n + 1)}

    def edges(self) -> list[tuple[int, int]]:
        return [(self(p), self(p + 1)) for p in range(1, self.n + 1)]

    @classmethod
    def identity(cls, n: int) -> "RingAssignment":
        return cls(tuple(range(1, n + 1)))


def shuffle_block_length(n: int, epsilon: float) -> int:
    """``floor(n^(epsilon/5))`` clamped to at least 2."""
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    f = math.floor(n ** (epsilon / 5) + 1e-9)
    return max(2, f)


def block_shuffle_assignment(n: int, epsilon: float, seed: int) -> RingAssignment:
    """Identity assignment with ids shuffled uniformly inside consecutive blocks.

    Blocks have length ``shuffle_block_length(n, epsilon)``; a shorter final
    block is shuffled the same way.  The result depends only on
    ``(seed, n, epsilon)``.
    """
    f = shuffle_block_length(n, epsilon)
    rng = Stream(derive_seed(seed, "block-shuffle-referee", n, repr(float(epsilon))))
    labels = list(range(1, n + 1))
    for start in range(0, n, f):
        block = labels[start:start + f]
        rng.shuffle(block)
        labels[start:start + f] = block
    return RingAssignment(tuple(labels))


class RingReferee(Protocol):
    def assign(self, n: int) -> RingAssignment: ...


class RingColoringPlayer(Protocol):
    def coloring(self, n: int) -> TripleColoring: ...

    def receive_assignment(self, assignment: RingAssignment, coloring: TripleColoring) -> None: ...

    def exceptions(self) -> set[int]: ...


@dataclass(frozen=True)
class BlockShuffleReferee:
    epsilon: float = 1.0
    seed: int = 0

    def assign(self, n: int) -> RingAssignment:
        return block_shuffle_assignment(n, self.epsilon, self.seed)


@dataclass(frozen=True)
class FixedReferee:
    assignment: RingAssignment

    def assign(self, n: int) -> RingAssignment:
        if n != self.assignment.n:
            raise ValueError("fixed assignment has the wrong size")
        return self.assignment


@dataclass
class GameTranscript:
    game: str
    exchanges: list[tuple] = field(default_factory=list)
    win: bool = False
    rounds_used: int = 0
    reason: str = ""
    record: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "win" if self.win else "lose"

    def to_json(self) -> dict:
        return {
            "game": self.game,
            "verdict": self.verdict,
            "rounds_used": self.rounds_used,
            "reason": self.reason,
            "exchanges": [list(x) for x in self.exchanges],
        }


def ring_colors(coloring: TripleColoring, assignment: RingAssignment) -> list[int]:
    """Colour of each ring position ``u_1..u_n`` under the committed map."""
    return [coloring(*assignment.triple(p)) for p in range(1, assignment.n + 1)]


def ring_violations(colors: Sequence[int], assignment: RingAssignment, exceptions: Iterable[int] = ()) -> list[tuple[int, int]]:
    """Adjacent surviving position pairs (i, i+1) sharing a colour."""
    dead = set(exceptions)
    n = assignment.n
    bad = []
    for p in range(1, n + 1):
        q = p % n + 1
        if assignment(p) in dead or assignment(q) in dead:
            continue
        if colors[p - 1] == colors[q - 1]:
            bad.append((p, q))
    return bad


def adjudicate_ring_coloring(record: dict) -> tuple[bool, str]:
    """Verdict from a stored record (colours, assignment, exceptions, budget)."""
    S = set(record["exceptions"])
    if len(S) > record["budget"]:
        return False, f"exception set of size {len(S)} exceeds budget {record['budget']}"
    bad = ring_violations(record["colors"], RingAssignment(tuple(record["labels"])), S)
    if bad:
        return False, f"{len(bad)} colouring violation(s), first at positions {bad[0]}"
    return True, "no surviving violations"


def play_selective_ring_coloring(
    player: RingColoringPlayer,
    referee: RingReferee,
    n: int,
    g: int | Callable[[int], int],
) -> GameTranscript:
    """Three rounds: commit C / assign ids, exchange, submit exceptions."""
    if n < 4:
        raise ValueError("selective ring colouring needs n >= 4")
    budget = g(n) if callable(g) else int(g)
    tr = GameTranscript("ring-coloring")
    # round 1: independent choices
    C = player.coloring(n)
    ell = referee.assign(n)
    tr.exchanges.append((1, "player", "coloring", C.seed))
    tr.exchanges.append((1, "referee", "assignment", list(ell.labels)))
    # round 2
    player.receive_assignment(ell, C)
    tr.exchanges.append((2, "exchange", "C<->l", None))
    # round 3
    S = set(player.exceptions())
    tr.exchanges.append((3, "player", "exceptions", sorted(S)))
    tr.rounds_used = 3
    tr.record = {
        "colors": ring_colors(C, ell),
        "labels": list(ell.labels),
        "exceptions": sorted(S),
        "budget": budget,
    }
    tr.win, tr.reason = adjudicate_ring_coloring(tr.record)
    return tr


# -- k-isolation ----------------------------------------------------------

IsolationPlay = Generator[int, bool, None]


class IsolationPlayer(Protocol):
    def play(self, k: int) -> IsolationPlay:
        """Yield one guess per round; each yield receives ``False`` ("no")."""


def play_isolation(
    player: IsolationPlayer,
    k: int,
    max_rounds: int,
    seed: int = 0,
    target: int | None = None,
) -> GameTranscript:
    if k < 2:
        raise ValueError("k-isolation needs k >= 2")
    if target is None:
        target = Stream(derive_seed(seed, "isolation-referee")).randrange(k) + 1
    tr = GameTranscript("isolation")
    tr.record = {"target": target, "k": k}
    gen = player.play(k)
    try:
        guess = next(gen)
    except StopIteration:
        tr.reason = "player stopped"
        return tr
    for rnd in range(1, max_rounds + 1):
        tr.rounds_used = rnd
        if not (isinstance(guess, int) and 1 <= guess <= k):
            tr.exchanges.append((rnd, guess, "out-of-range"))
        elif guess == target:
            tr.exchanges.append((rnd, guess, "yes"))
            tr.win = True
            tr.reason = "target found"
            gen.close()
            return tr
        else:
            tr.exchanges.append((rnd, guess, "no"))
        if rnd == max_rounds:
            break
        try:
            guess = gen.send(False)
        except StopIteration:
            tr.reason = "player stopped"
            return tr
    gen.close()
    tr.reason = "rounds exhausted"
    return tr


@dataclass(frozen=True)
class UniformGuessPlayer:
    seed: int = 0

    def play(self, k: int) -> IsolationPlay:
        rng = Stream(self.seed)
        while True:
            yield rng.randrange(k) + 1


@dataclass(frozen=True)
class ExclusionPlayer:
    """Guesses uniformly among values not yet ruled out; wins in r rounds w.p. exactly r/k."""

    seed: int = 0

    def play(self, k: int) -> IsolationPlay:
        rng = Stream(self.seed)
        left = list(range(1, k + 1))
        while left:
            i = rng.randrange(len(left))
            left[i], left[-1] = left[-1], left[i]
            yield left.pop()


@dataclass(frozen=True)
class ConstantGuessPlayer:
    value: int = 1

    def play(self, k: int) -> IsolationPlay:
        while True:
            yield self.value


@dataclass(frozen=True)
class ScriptedGuessPlayer:
    guesses: tuple[int, ...]

    def play(self, k: int) -> IsolationPlay:
        for g in self.guesses:
            yield g


# -- k-bit revealing ------------------------------------------------------


@dataclass(frozen=True)
class Reveal:
    index: int


@dataclass(frozen=True)
class Guess:
    bits: tuple[int, ...]


BitPlay = Generator["Reveal | Guess", "int | None", None]


class BitRevealPlayer(Protocol):
    def play(self, k: int) -> BitPlay:
        """Yield ``Reveal(i)`` (answered with the bit) or a final ``Guess``."""


def random_bits(k: int, seed: int) -> tuple[int, ...]:
    v = Stream(derive_seed(seed, "bit-referee")).getrandbits(k)
    return tuple((v >> i) & 1 for i in range(k))


def play_bit_revealing(
    player: BitRevealPlayer,
    k: int,
    max_rounds: int,
    seed: int = 0,
    kappa: Sequence[int] | None = None,
) -> GameTranscript:
    """One reveal per round; a guess may follow any round (or precede the first)."""
    if k < 1:
        raise ValueError("k-bit revealing needs k >= 1")
    kappa = tuple(kappa) if kappa is not None else random_bits(k, seed)
    if len(kappa) != k:
        raise ValueError("hidden string has the wrong length")
    tr = GameTranscript("bit-reveal")
    tr.record = {"kappa": list(kappa), "k": k}
    gen = player.play(k)
    reply = None
    while True:
        try:
            msg = gen.send(reply) if tr.exchanges else next(gen)
        except StopIteration:
            tr.reason = "player stopped without guessing"
            return tr
        if isinstance(msg, Reveal):
            if tr.rounds_used >= max_rounds:
                gen.close()
                tr.reason = "round budget exhausted"
                return tr
            tr.rounds_used += 1
            i = msg.index
            reply = kappa[i - 1] if isinstance(i, int) and 1 <= i <= k else None
            tr.exchanges.append((tr.rounds_used, "reveal", i, reply))
            continue
        if isinstance(msg, Guess):
            gen.close()
            tr.exchanges.append((tr.rounds_used, "guess", "".join(map(str, msg.bits)), None))
            if len(msg.bits) != k:
                tr.reason = f"malformed guess of length {len(msg.bits)}"
                return tr
            tr.win = tuple(msg.bits) == kappa
            tr.reason = "correct" if tr.win else "wrong string"
            return tr
        gen.close()
        tr.reason = f"unrecognised move {msg!r}"
        return tr


@dataclass(frozen=True)
class ReadThenGuessPlayer:
    """Reveal bits ``1..t``, then guess with the unread bits uniform."""

    t: int
    seed: int = 0

    def play(self, k: int) -> BitPlay:
        known = []
        for i in range(1, min(self.t, k) + 1):
            known.append((yield Reveal(i)))
        rest = k - len(known)
        v = Stream(self.seed).getrandbits(rest) if rest else 0
        yield Guess(tuple(known) + tuple((v >> i) & 1 for i in range(rest)))


@dataclass(frozen=True)
class FixedGuessPlayer:
    bits: tuple[int, ...]

    def play(self, k: int) -> BitPlay:
        yield Guess(self.bits)


# -- Monte Carlo estimation -----------------------------------------------


@dataclass(frozen=True)
class WinRate:
    wins: int
    trials: int

    @property
    def rate(self) -> float:
        return self.wins / self.trials

    @property
    def wilson(self) -> tuple[float, float]:
        ci = binomtest(self.wins, self.trials).proportion_ci(confidence_level=0.95, method="wilson")
        return float(ci.low), float(ci.high)

    @property
    def half_width(self) -> float:
        lo, hi = self.wilson
        return (hi - lo) / 2

    @property
    def sigma(self) -> float:
        p = self.rate
        return math.sqrt(max(p * (1 - p), 0.0) / self.trials)


def win_rate(play_one: Callable[[int], GameTranscript], trials: int, seed: int) -> WinRate:
    """Run ``play_one(trial_seed)`` for ``trials`` derived seeds."""
    wins = 0
    for t in range(trials):
        wins += play_one(derive_seed(seed, "trial", t)).win
    return WinRate(wins, trials)


PLAYERS = {
    "isolation": {
        "uniform": lambda s, **kw: UniformGuessPlayer(s),
        "exclusion": lambda s, **kw: ExclusionPlayer(s),
        "constant": lambda s, value=1, **kw: ConstantGuessPlayer(value),
    },
    "bit-reveal": {
        "read-then-guess": lambda s, t=0, **kw: ReadThenGuessPlayer(t, s),
    },
}
