"""Bitstring individuals, objective vectors, dominance relations and populations.

Everything here is a value type: genotype and objective arrays are treated as
immutable once constructed, so populations can be shared freely between the
optimizer, the metrics and the experiment harness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RandomSource",
    "Individual",
    "Population",
    "dominates",
    "weakly_dominates",
    "random_bitstring",
]


class RandomSource:
    """Deterministic random stream for one optimizer run.

    Every stochastic decision of a run (initialization, mutation, every
    "break ties randomly") draws from a single RandomSource, so a run is a
    pure function of its configuration and seed.
    """

    __slots__ = ("seed", "_rng")

    def __init__(self, seed: int) -> None:
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)

    def random(self, size=None):
        return self._rng.random(size)

    def integers(self, low, high=None, size=None):
        return self._rng.integers(low, high, size)

    def permutation(self, x) -> np.ndarray:
        return self._rng.permutation(x)

    def shuffle(self, x) -> None:
        self._rng.shuffle(x)

    def choice(self, a, size=None, replace=True):
        return self._rng.choice(a, size=size, replace=replace)

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed})"


def weakly_dominates(a, b) -> bool:
    """True iff ``a >= b`` componentwise (maximization)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"objective vectors differ in shape: {a.shape} vs {b.shape}")
    return bool(np.all(a >= b))


def dominates(a, b) -> bool:
    """True iff ``a >= b`` componentwise with at least one strict inequality."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"objective vectors differ in shape: {a.shape} vs {b.shape}")
    return bool(np.all(a >= b) and np.any(a > b))


def random_bitstring(n: int, rng: RandomSource) -> np.ndarray:
    """Uniform random bitstring of length ``n`` (each bit Bernoulli(1/2))."""
    if n < 2:
        raise ValueError(f"problem size must be >= 2, got {n}")
    return rng.integers(0, 2, n).astype(np.uint8)


@dataclass(frozen=True)
class Individual:
    """A genotype with its cached objective vector."""

    genotype: np.ndarray
    objectives: tuple[int, ...]


class Population:
    """Ordered multiset of evaluated individuals, stored as dense arrays.

    ``genotypes`` has shape (size, n) with uint8 bits and ``objectives`` shape
    (size, M) with integer objective values; row i of both belongs to the same
    individual. Duplicates are permitted (multiset semantics).
    """

    __slots__ = ("genotypes", "objectives")

    def __init__(self, genotypes: np.ndarray, objectives: np.ndarray) -> None:
        genotypes = np.asarray(genotypes, dtype=np.uint8)
        objectives = np.asarray(objectives)
        if genotypes.ndim != 2 or objectives.ndim != 2:
            raise ValueError("genotypes and objectives must be 2-D arrays")
        if genotypes.shape[0] != objectives.shape[0]:
            raise ValueError(
                f"row mismatch: {genotypes.shape[0]} genotypes vs "
                f"{objectives.shape[0]} objective rows"
            )
        self.genotypes = genotypes
        self.objectives = objectives

    @classmethod
    def from_genotypes(cls, genotypes: np.ndarray, benchmark) -> "Population":
        """Evaluate ``genotypes`` on ``benchmark`` and cache the objectives."""
        genotypes = np.atleast_2d(np.asarray(genotypes, dtype=np.uint8))
        return cls(genotypes, benchmark.evaluate(genotypes))

    @property
    def size(self) -> int:
        return self.genotypes.shape[0]

    @property
    def n(self) -> int:
        return self.genotypes.shape[1]

    @property
    def f1(self) -> np.ndarray:
        return self.objectives[:, 0]

    @property
    def members(self) -> list[Individual]:
        return [
            Individual(self.genotypes[i], tuple(int(v) for v in self.objectives[i]))
            for i in range(self.size)
        ]

    def take(self, indices) -> "Population":
        indices = np.asarray(indices, dtype=np.intp)
        return Population(self.genotypes[indices], self.objectives[indices])

    def concat(self, other: "Population") -> "Population":
        return Population(
            np.concatenate([self.genotypes, other.genotypes]),
            np.concatenate([self.objectives, other.objectives]),
        )

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"Population(size={self.size}, n={self.n})"
