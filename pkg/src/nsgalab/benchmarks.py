"""Bi-objective pseudo-Boolean benchmarks and their Pareto fronts."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BenchmarkTag",
    "BenchmarkId",
    "oneminmax_eval",
    "lotz_eval",
    "pareto_front",
]


class BenchmarkTag(str, enum.Enum):
    ONEMINMAX = "oneminmax"
    LOTZ = "lotz"


@dataclass(frozen=True)
class BenchmarkId:
    tag: BenchmarkTag
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "tag", BenchmarkTag(self.tag))
        if self.n < 2:
            raise ValueError(f"problem size must be >= 2, got {self.n}")

    def evaluate(self, genotypes: np.ndarray) -> np.ndarray:
        """Batch evaluation: (k, n) bits -> (k, 2) int64 objective rows."""
        genotypes = np.atleast_2d(np.asarray(genotypes))
        if genotypes.shape[1] != self.n:
            raise ValueError(
                f"bitstring length {genotypes.shape[1]} != problem size {self.n}"
            )
        if self.tag is BenchmarkTag.ONEMINMAX:
            return _oneminmax_batch(genotypes)
        return _lotz_batch(genotypes)


def _oneminmax_batch(genotypes: np.ndarray) -> np.ndarray:
    n = genotypes.shape[1]
    ones = genotypes.sum(axis=1, dtype=np.int64)
    return np.stack([ones, n - ones], axis=1)


def _lotz_batch(genotypes: np.ndarray) -> np.ndarray:
    n = genotypes.shape[1]
    zero_mask = genotypes == 0
    # first zero position, or n if the row is all ones
    lo = np.where(zero_mask.any(axis=1), zero_mask.argmax(axis=1), n)
    one_mask_rev = genotypes[:, ::-1] == 1
    tz = np.where(one_mask_rev.any(axis=1), one_mask_rev.argmax(axis=1), n)
    return np.stack([lo.astype(np.int64), tz.astype(np.int64)], axis=1)


def oneminmax_eval(x) -> np.ndarray:
    """(number of ones, number of zeros) of a single bitstring."""
    x = np.asarray(x)
    return _oneminmax_batch(x[None, :])[0]


def lotz_eval(x) -> np.ndarray:
    """(length of the leading-ones prefix, length of the trailing-zeros suffix)."""
    x = np.asarray(x)
    return _lotz_batch(x[None, :])[0]


def pareto_front(benchmark: BenchmarkId) -> set[tuple[int, int]]:
    """The front {(k, n-k) : k = 0..n}, identical for both benchmarks."""
    n = benchmark.n
    return {(k, n - k) for k in range(n + 1)}
