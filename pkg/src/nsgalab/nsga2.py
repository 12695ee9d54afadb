"""Crowding-distance survival selection variants used as comparison baselines:
classic one-shot selection, sequential removal with recomputed scores, and the
steady-state single-offspring mode."""

from __future__ import annotations

import numpy as np

from .core import Population, RandomSource
from .sorting import fast_nondominated_sort
from .variation import VariationConfig

__all__ = [
    "crowding_distance",
    "classic_survival",
    "sequential_survival",
    "steady_state_step",
]


def crowding_distance(front) -> np.ndarray:
    """Crowding score per front member.

    Per objective the two boundary individuals of the sort order get +inf and
    an interior individual accumulates (next - prev) / (max - min); an
    objective with zero range contributes nothing.
    """
    objs = front.objectives if isinstance(front, Population) else np.asarray(front)
    objs = np.atleast_2d(objs)
    k, M = objs.shape
    if k == 0:
        raise ValueError("crowding distance of an empty front is undefined")
    scores = np.zeros(k)
    for m in range(M):
        idx = np.argsort(objs[:, m], kind="stable")
        vals = objs[idx, m].astype(float)
        span = vals[-1] - vals[0]
        scores[idx[0]] = np.inf
        scores[idx[-1]] = np.inf
        if span > 0 and k > 2:
            scores[idx[1:-1]] += (vals[2:] - vals[:-2]) / span
    return scores


def _ranks(pop: Population) -> np.ndarray:
    partition = fast_nondominated_sort(pop)
    ranks = np.empty(pop.size, dtype=np.int64)
    for r, front in enumerate(partition.fronts):
        ranks[front] = r
    return ranks


def classic_survival(combined: Population, N: int, rng: RandomSource) -> Population:
    """Keep the N best by (front rank, crowding distance), scores computed once.

    Ties are broken uniformly at random.
    """
    if combined.size < N:
        raise ValueError(f"cannot keep {N} of {combined.size} individuals")
    if combined.size == N:
        return combined
    partition = fast_nondominated_sort(combined)
    ranks = np.empty(combined.size, dtype=np.int64)
    crowding = np.empty(combined.size)
    for r, front in enumerate(partition.fronts):
        ranks[front] = r
        crowding[front] = crowding_distance(combined.objectives[front])
    tie_key = rng.random(combined.size)
    order = np.lexsort((tie_key, -crowding, ranks))
    return combined.take(order[:N])


def sequential_survival(combined: Population, N: int, rng: RandomSource) -> Population:
    """Remove one minimum-crowding individual of the worst front at a time,
    recomputing crowding distances after each removal, until N remain."""
    if combined.size < N:
        raise ValueError(f"cannot keep {N} of {combined.size} individuals")
    partition = fast_nondominated_sort(combined)
    alive = np.ones(combined.size, dtype=bool)
    worst = len(partition.fronts) - 1
    removals = combined.size - N
    for _ in range(removals):
        while not alive[partition.fronts[worst]].any():
            worst -= 1
        front = partition.fronts[worst]
        members = front[alive[front]]
        scores = crowding_distance(combined.objectives[members])
        ties = members[scores == scores.min()]
        victim = ties[rng.integers(0, ties.size)] if ties.size > 1 else ties[0]
        alive[victim] = False
    return combined.take(np.flatnonzero(alive))


def steady_state_step(
    pop: Population, benchmark, cfg: VariationConfig, rng: RandomSource
) -> Population:
    """One offspring from a uniformly drawn parent (one evaluation), then one
    removal by the (rank, crowding) rule."""
    parent = int(rng.integers(0, pop.size))
    flips = rng.random(pop.n) < cfg.resolved_rate(pop.n)
    child = Population.from_genotypes(pop.genotypes[parent] ^ flips, benchmark)
    combined = pop.concat(child)

    partition = fast_nondominated_sort(combined)
    worst = partition.fronts[-1]
    scores = crowding_distance(combined.objectives[worst])
    ties = worst[scores == scores.min()]
    victim = ties[rng.integers(0, ties.size)] if ties.size > 1 else ties[0]
    keep = np.flatnonzero(np.arange(combined.size) != victim)
    return combined.take(keep)
