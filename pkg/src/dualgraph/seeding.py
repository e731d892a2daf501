"""Deterministic seed derivation and counter-based random streams.

Every random choice in the package is a pure function of a master seed and
a tuple of labels, so trials, nodes and rounds can be replayed in any order.
"""

from __future__ import annotations

import hashlib
import math
from typing import MutableSequence, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

_TWO53 = float(2**53)


def derive_seed(master: int, *labels: object) -> int:
    """Return a 64-bit seed for ``(master, *labels)``.

    Labels should be ints, strings or tuples of those; their ``repr`` is
    hashed, so distinct label tuples give unrelated seeds.
    """
    data = repr((int(master),) + labels).encode()
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def uniform_from_bits(bits: int) -> float:
    """Map a 64-bit integer onto [0, 1) using its top 53 bits (exact in a double)."""
    return (bits >> 11) / _TWO53


def uniforms(seed: int, count: int) -> np.ndarray:
    """``count`` uniforms from a Philox stream keyed by ``seed``.

    Element ``i`` does not depend on ``count``, which lets callers index the
    stream by node id.
    """
    return np.random.Generator(np.random.Philox(key=seed)).random(count)


class Stream:
    """Small counter-based RNG: draw ``i`` is ``blake2b(seed, i)``.

    Cheap to construct, which matters when every one of 10^6 game trials
    needs its own private stream.
    """

    __slots__ = ("seed", "_counter", "_key")

    def __init__(self, seed: int) -> None:
        self.seed = int(seed)
        self._counter = 0
        self._key = self.seed.to_bytes(8, "little", signed=False)

    def _next64(self) -> int:
        self._counter += 1
        h = hashlib.blake2b(self._counter.to_bytes(8, "little"), digest_size=8, key=self._key)
        return int.from_bytes(h.digest(), "little")

    def random(self) -> float:
        return uniform_from_bits(self._next64())

    def getrandbits(self, k: int) -> int:
        out = 0
        filled = 0
        while filled < k:
            out |= self._next64() << filled
            filled += 64
        return out & ((1 << k) - 1)

    def randrange(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection sampling."""
        if n <= 0:
            raise ValueError("randrange() needs n > 0")
        bits = max(1, math.ceil(math.log2(n))) if n > 1 else 1
        while True:
            v = self.getrandbits(bits)
            if v < n:
                return v

    def randint(self, a: int, b: int) -> int:
        return a + self.randrange(b - a + 1)

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.randrange(len(seq))]

    def shuffle(self, seq: MutableSequence[T]) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randrange(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
