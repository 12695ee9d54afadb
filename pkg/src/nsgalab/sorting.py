"""Non-dominated sorting into fronts and critical-front location."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Population

__all__ = ["FrontPartition", "fast_nondominated_sort", "critical_front_index"]


@dataclass(frozen=True)
class FrontPartition:
    """Disjoint fronts F_1, F_2, ... as index arrays into the input population.

    Indices inside each front are ascending, i.e. input order is preserved.
    """

    fronts: tuple[np.ndarray, ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.fronts)


def fast_nondominated_sort(pop) -> FrontPartition:
    """Partition a population into non-dominated fronts.

    Accepts a Population or a (k, M) objective array. Uses the classic
    dominance-count peeling; populations here are small (<= ~600), so the
    quadratic comparison matrix is computed in one vectorized pass.
    """
    objs = pop.objectives if isinstance(pop, Population) else np.asarray(pop)
    if objs.ndim != 2 or objs.shape[0] == 0:
        raise ValueError("population must be a non-empty (k, M) objective array")
    k, M = objs.shape

    # accumulate the dominance matrix objective by objective; 2-D boolean
    # matrices are much cheaper than reducing a (k, k, M) broadcast
    col = objs[:, 0]
    ge = col[:, None] >= col[None, :]
    gt = col[:, None] > col[None, :]
    for m in range(1, M):
        col = objs[:, m]
        ge &= col[:, None] >= col[None, :]
        gt |= col[:, None] > col[None, :]
    dom = ge & gt  # dom[i, j]: i dominates j

    counts = dom.sum(axis=0).astype(np.int64)
    fronts: list[np.ndarray] = []
    assigned = 0
    while assigned < k:
        front = np.flatnonzero(counts == 0)
        fronts.append(front)
        assigned += front.size
        counts -= dom[front].sum(axis=0)
        counts[front] = -1
    return FrontPartition(tuple(fronts))


def critical_front_index(partition: FrontPartition, N: int) -> int:
    """Smallest i* (1-based) with |F_1| + ... + |F_{i*}| >= N."""
    if N < 1:
        raise ValueError(f"capacity must be >= 1, got {N}")
    total = 0
    for i, front in enumerate(partition.fronts, start=1):
        total += len(front)
        if total >= N:
            return i
    raise ValueError(f"population of size {total} cannot fill capacity {N}")
