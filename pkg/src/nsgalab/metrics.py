"""Approximation-quality metric (maximum empty interval), bound formulas and
population telemetry reports."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Population, RandomSource

__all__ = [
    "MeiReport",
    "TheoryBounds",
    "mei",
    "mei_opt",
    "theory_bounds",
    "population_report",
]

# Guard subtracted before ceiling irrational-valued bound formulas, so that a
# value that is mathematically just below an integer cannot round up through
# floating-point error.
CEIL_GUARD = 1e-15

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class MeiReport:
    mei: int
    sorted_f1: tuple[int, ...]
    covers_extremals: tuple[bool, bool]  # (0^n present, 1^n present)
    active_refpoints: int


@dataclass(frozen=True)
class TheoryBounds:
    mei_opt: int
    mei_upper: int
    runtime_exponent: int


def mei(values, n: int) -> int:
    """Maximum empty interval of a multiset of first-objective values.

    Sorts the distinct values ascending as j_1..j_m and returns
    max(j_1, n - j_m, consecutive differences). Duplicates never change the
    gap structure, so the multiset is reduced to its distinct values.
    """
    vals = np.unique(np.asarray(values, dtype=np.int64))
    if vals.size == 0:
        raise ValueError("MEI of an empty value set is undefined")
    if vals[0] < 0 or vals[-1] > n:
        raise ValueError(f"values must lie in [0, {n}]")
    best = max(int(vals[0]), int(n - vals[-1]))
    if vals.size > 1:
        best = max(best, int(np.diff(vals).max()))
    return best


def mei_opt(N: int, n: int) -> int:
    """Smallest achievable MEI for a size-N archive covering both extremal
    values: ceil(n / (N - 1)), computed in exact integer arithmetic."""
    if N < 2:
        raise ValueError(f"population size must be >= 2, got {N}")
    return -(-n // (N - 1))


def _guarded_ceil(x: float) -> int:
    return math.ceil(x - CEIL_GUARD)


def theory_bounds(n: int, N: int, N_r: int) -> TheoryBounds:
    """Optimal MEI, the survival-selection MEI upper bound, and the
    reference-point activation runtime exponent."""
    if N < 2:
        raise ValueError(f"population size must be >= 2, got {N}")
    if N_r < 2:
        raise ValueError(f"reference point count must be >= 2, got {N_r}")
    return TheoryBounds(
        mei_opt=mei_opt(N, n),
        mei_upper=_guarded_ceil((5.0 - 2.0 * SQRT2) * n / (N_r - 1)),
        runtime_exponent=_guarded_ceil(2.0 * (2.0 - SQRT2) * n / (N_r - 1)),
    )


def population_report(
    pop: Population,
    refs,
    n: int,
    *,
    assignments: np.ndarray | None = None,
    rng: RandomSource | None = None,
) -> MeiReport:
    """MEI, extremal coverage and active reference point count of a population.

    If ``assignments`` (one reference point index per member) is not supplied,
    a fresh normalization and association over the population's own fronts is
    computed to count active reference points.
    """
    f1 = pop.f1
    f2 = pop.objectives[:, 1]
    covers = (
        bool(np.any((f1 == 0) & (f2 == n))),
        bool(np.any((f1 == n) & (f2 == 0))),
    )
    if assignments is None:
        from .nsga3 import NormalizationState, associate, normalize
        from .sorting import fast_nondominated_sort

        partition = fast_nondominated_sort(pop)
        fronts = [pop.objectives[f] for f in partition.fronts]
        state = NormalizationState.initial(pop.objectives.shape[1])
        normalized, _ = normalize(fronts, state, rng=rng or RandomSource(0))
        assoc = associate(normalized, refs, rng or RandomSource(0))
        assignments = assoc.assignments
    return MeiReport(
        mei=mei(f1, n),
        sorted_f1=tuple(int(v) for v in np.unique(f1)),
        covers_extremals=covers,
        active_refpoints=int(np.unique(assignments).size),
    )
