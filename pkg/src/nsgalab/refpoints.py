"""Structured simplex-lattice reference point generation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ReferencePointSet", "das_dennis", "divisions_for_count"]


@dataclass(frozen=True)
class ReferencePointSet:
    """All lattice points (k_1/p, ..., k_M/p) with sum k_i = p, lexicographic."""

    points: np.ndarray  # (N_r, M) float64
    p: int
    M: int

    @property
    def size(self) -> int:
        return self.points.shape[0]


def _compositions(total: int, parts: int):
    """Weak compositions of ``total`` into ``parts`` parts, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head, *tail)


def das_dennis(M: int, p: int) -> ReferencePointSet:
    """Uniform reference points on the unit simplex with p divisions per axis.

    Coordinates are generated as integer lattice tuples and divided by p once
    at the end, so consecutive bi-objective points differ by exactly 1/p.
    """
    if M < 2:
        raise ValueError(f"objective count must be >= 2, got {M}")
    if p < 1:
        raise ValueError(f"divisions per objective must be >= 1, got {p}")
    lattice = np.array(list(_compositions(p, M)), dtype=np.int64)
    assert lattice.shape[0] == math.comb(M + p - 1, p)
    return ReferencePointSet(points=lattice / p, p=p, M=M)


def divisions_for_count(M: int, N_r: int) -> int:
    """Divisions p such that das_dennis(M, p) has exactly N_r points (M=2 only)."""
    if M != 2:
        raise ValueError("point-count inversion is only defined for M=2")
    if N_r < 2:
        raise ValueError(f"reference point count must be >= 2, got {N_r}")
    return N_r - 1
