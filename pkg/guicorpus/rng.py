"""
Seeded Random Module

Every stochastic choice in guicorpus (element-cap sampling, random walks,
pack prefix ids, instruction templates, the random predictor) draws from
SeededRandom, so identical seeds give identical bytes on every machine.

The generator is numpy's PCG64 (128-bit state, XSL-RR output, 64-bit words)
seeded through numpy's SeedSequence. Only the raw 64-bit word stream is used;
bounded integers are drawn by rejection sampling so the mapping from words to
choices never depends on numpy's higher-level sampling routines.

Classes:
- SeededRandom: Deterministic random source built on PCG64 raw output.

Functions:
- derive_seed: Derives an independent child seed from a parent seed and labels.
"""
import hashlib
from typing import List, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *labels: object) -> int:
    """
    Derives a 64-bit seed for a named component from a parent seed.

    :param seed: The parent seed.
    :param labels: Component names or record keys mixed into the child seed.
    :return: The derived seed.
    """
    material = ":".join([str(seed & MASK64)] + [str(label) for label in labels])
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class SeededRandom:
    """
    Deterministic random source over the PCG64 64-bit word stream.
    """

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._bits = np.random.PCG64(self.seed)

    def next_u64(self) -> int:
        return int(self._bits.random_raw())

    def randbelow(self, n: int) -> int:
        """
        Draws a uniform integer in [0, n).

        :param n: Exclusive upper bound, at least 1.
        :return: The drawn integer.
        """
        if n < 1:
            raise ValueError(f"randbelow needs n >= 1, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            word = self.next_u64()
            if word < limit:
                return word % n

    def choice(self, items: Sequence[T]) -> T:
        if not items:
            raise ValueError("choice from an empty sequence")
        return items[self.randbelow(len(items))]

    def sample_indices(self, population: int, k: int) -> List[int]:
        """
        Draws k distinct indices from range(population) without replacement.

        Uses a partial Fisher-Yates shuffle; the result is in draw order.

        :param population: Size of the index range.
        :param k: Number of indices to draw, at most population.
        :return: The drawn indices.
        """
        if not 0 <= k <= population:
            raise ValueError(f"cannot sample {k} of {population}")
        pool = list(range(population))
        for i in range(k):
            j = i + self.randbelow(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
