"""Reference-point niching generation step: objective normalization,
association to reference directions, and niche-count survival selection.

The survival selection processes reference points in rounds of equal niche
count. Within one round every still-eligible reference point is visited
exactly once in uniformly random order; a visited point either contributes its
closest unselected associate or, if it has none left, drops out. Because the
per-point candidate queues are disjoint, a round's outcome does not depend on
the visiting order except in the final, partially completed round, so full
rounds are executed as batch array operations and only the last round walks an
explicit random permutation. This is distribution-identical to drawing the
minimum-niche-count point one at a time with uniform tie-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Population, RandomSource
from .metrics import mei
from .refpoints import ReferencePointSet
from .sorting import critical_front_index, fast_nondominated_sort
from .variation import VariationConfig, generate_offspring

__all__ = [
    "NormalizationState",
    "AssociationResult",
    "GenerationTelemetry",
    "asf",
    "normalize",
    "perpendicular_distances",
    "associate",
    "niching_select",
    "survival_select",
    "nsga3_generation",
]

DEFAULT_EPS_NAD = 1e-6
DEFAULT_ASF_EPS = 1e-6


@dataclass
class NormalizationState:
    """Ideal/worst estimates and extreme points carried across generations.

    ``z_star``/``z_worst`` are the running observed minimum/maximum per
    objective (never shrunk); ``extreme_points`` holds the previous
    iteration's extreme points as raw objective rows, +inf until first set.
    """

    z_star: np.ndarray
    z_worst: np.ndarray
    extreme_points: np.ndarray
    eps_nad: float = DEFAULT_EPS_NAD
    asf_eps: float = DEFAULT_ASF_EPS
    z_hat_star: np.ndarray | None = field(default=None)
    z_hat_nad: np.ndarray | None = field(default=None)

    @classmethod
    def initial(
        cls, M: int, eps_nad: float = DEFAULT_EPS_NAD, asf_eps: float = DEFAULT_ASF_EPS
    ) -> "NormalizationState":
        return cls(
            z_star=np.full(M, np.inf),
            z_worst=np.full(M, -np.inf),
            extreme_points=np.full((M, M), np.inf),
            eps_nad=eps_nad,
            asf_eps=asf_eps,
        )

    def observe(self, objectives: np.ndarray) -> None:
        objs = np.asarray(objectives, dtype=float)
        self.z_star = np.minimum(self.z_star, objs.min(axis=0))
        self.z_worst = np.maximum(self.z_worst, objs.max(axis=0))

    def copy(self) -> "NormalizationState":
        return NormalizationState(
            z_star=self.z_star.copy(),
            z_worst=self.z_worst.copy(),
            extreme_points=self.extreme_points.copy(),
            eps_nad=self.eps_nad,
            asf_eps=self.asf_eps,
            z_hat_star=None if self.z_hat_star is None else self.z_hat_star.copy(),
            z_hat_nad=None if self.z_hat_nad is None else self.z_hat_nad.copy(),
        )


def asf(z, axis: int, eps_w: float = DEFAULT_ASF_EPS) -> float:
    """Achievement scalarization of a translated objective vector: max_i z_i/w_i
    with w the unit vector on ``axis`` and off-axis weights ``eps_w``."""
    z = np.asarray(z, dtype=float)
    w = np.full(z.shape[-1], eps_w)
    w[axis] = 1.0
    return float(np.max(z / w))


def _argmin_random(values: np.ndarray, rng: RandomSource | None) -> int:
    ties = np.flatnonzero(values == values.min())
    if ties.size == 1 or rng is None:
        return int(ties[0])
    return int(ties[rng.integers(0, ties.size)])


def normalize(
    fronts, state: NormalizationState, rng: RandomSource | None = None
) -> tuple[np.ndarray, NormalizationState]:
    """Normalize the objective rows of fronts F_1..F_{i*}.

    Returns the normalized rows for the concatenation of ``fronts`` in order,
    and the updated state. Estimation of the nadir point:

    1. extreme point e(j) per axis = ASF argmin over current points and the
       previous extreme points (ties broken uniformly at random via ``rng``);
    2. if the e(j) are linearly independent and the hyperplane through them
       has axis intercepts I_j with eps_nad <= I_j <= z_worst_j, the nadir
       estimate is the intercepts; otherwise the maximum over F_1;
    3. any coordinate still within eps_nad of the ideal estimate falls back to
       the maximum over all given fronts; a denominator below eps_nad after
       that is replaced by eps_nad so degenerate populations still normalize.
    """
    fronts = [np.asarray(f, dtype=float) for f in fronts]
    if not fronts or any(f.shape[0] == 0 for f in fronts):
        raise ValueError("normalize requires at least one non-empty front")
    Z = np.concatenate(fronts, axis=0)
    M = Z.shape[1]

    state.observe(Z)
    z_hat_star = state.z_star.copy()

    prev = state.extreme_points[np.isfinite(state.extreme_points).all(axis=1)]
    candidates = np.concatenate([Z, prev], axis=0)
    # Maximization orientation: score candidates by their shortfall from the
    # observed per-objective maxima, with the on-axis shortfall weighted by
    # 1/eps. The minimizer is the point best in objective j, refined toward
    # the front; translating by the ideal estimate instead would let
    # dominated near-origin points win the scalarization.
    shortfall = state.z_worst - candidates
    extreme = np.empty((M, M))
    for j in range(M):
        w = np.ones(M)
        w[j] = state.asf_eps
        pick = _argmin_random((shortfall / w).max(axis=1), rng)
        extreme[j] = candidates[pick]
    state.extreme_points = extreme

    z_hat_nad = None
    try:
        beta = np.linalg.solve(extreme, np.ones(M))
        with np.errstate(divide="ignore", over="ignore"):
            intercepts = 1.0 / beta
        if np.all(np.isfinite(intercepts)) and np.all(
            (intercepts >= state.eps_nad) & (intercepts <= state.z_worst)
        ):
            z_hat_nad = intercepts
    except np.linalg.LinAlgError:
        pass
    if z_hat_nad is None:
        z_hat_nad = fronts[0].max(axis=0)

    degenerate = z_hat_nad < z_hat_star + state.eps_nad
    if degenerate.any():
        z_hat_nad = np.where(degenerate, Z.max(axis=0), z_hat_nad)

    denom = z_hat_nad - z_hat_star
    denom = np.where(denom < state.eps_nad, state.eps_nad, denom)

    state.z_hat_star = z_hat_star
    state.z_hat_nad = z_hat_nad
    return (Z - z_hat_star) / denom, state


@dataclass(frozen=True)
class AssociationResult:
    """Per-individual nearest reference point and perpendicular distance."""

    assignments: np.ndarray  # (k,) reference point index
    distances: np.ndarray  # (k,) distance to the assigned point's direction line


def perpendicular_distances(normalized: np.ndarray, refs: ReferencePointSet) -> np.ndarray:
    """(k, N_r) matrix of perpendicular distances from each normalized row to
    each reference point's direction line through the origin.

    Bi-objective distances use the 2-D cross product, which is exact for
    points on a ray; higher dimensions use the residual vector. Both avoid
    the cancellation of the sqrt(|z|^2 - proj^2) form near zero.
    """
    Z = np.atleast_2d(np.asarray(normalized, dtype=float))
    unit = refs.points / np.linalg.norm(refs.points, axis=1, keepdims=True)
    if Z.shape[1] == 2:
        return np.abs(np.outer(Z[:, 0], unit[:, 1]) - np.outer(Z[:, 1], unit[:, 0]))
    proj = Z @ unit.T  # (k, N_r)
    residual = Z[:, None, :] - proj[:, :, None] * unit[None, :, :]
    return np.linalg.norm(residual, axis=2)


def associate(
    normalized: np.ndarray, refs: ReferencePointSet, rng: RandomSource
) -> AssociationResult:
    """Assign each normalized row to the reference point whose direction line
    through the origin is nearest in perpendicular distance (uniform random
    tie-breaking)."""
    dist = perpendicular_distances(normalized, refs)
    mins = dist.min(axis=1)
    assignments = dist.argmin(axis=1)
    tie_rows = np.flatnonzero((dist == mins[:, None]).sum(axis=1) > 1)
    for i in tie_rows:
        options = np.flatnonzero(dist[i] == mins[i])
        assignments[i] = options[rng.integers(0, options.size)]
    return AssociationResult(assignments=assignments, distances=mins)


def niching_select(
    z_t: Population,
    f_crit: Population,
    refs: ReferencePointSet,
    assoc: AssociationResult,
    N: int,
    rng: RandomSource,
    *,
    rho_positive: str = "random",
) -> np.ndarray:
    """Select indices into ``f_crit`` so that |Z_t| + |selection| = N.

    ``assoc`` must cover the concatenation of ``z_t`` and ``f_crit`` in that
    order. ``rho_positive`` chooses the candidate taken from a reference point
    whose niche count is already positive: "random" (uniform among its
    remaining associates, the original behavior, and the one that reproduces
    the published measurements) or "closest" (always distance-minimizing).
    """
    if rho_positive not in ("closest", "random"):
        raise ValueError(f"unknown rho_positive mode: {rho_positive!r}")
    nz = z_t.size
    k = f_crit.size
    needed = N - nz
    if not 0 < needed <= k:
        raise ValueError(
            f"selection requires |Z_t| < N <= |Z_t| + |F_crit| "
            f"(got |Z_t|={nz}, N={N}, |F_crit|={k})"
        )
    if assoc.assignments.shape[0] != nz + k:
        raise ValueError("association does not cover Z_t and the critical front")

    n_refs = refs.size
    rho = np.bincount(assoc.assignments[:nz], minlength=n_refs)
    f_assign = assoc.assignments[nz:]
    f_dist = assoc.distances[nz:]

    # Disjoint per-reference-point candidate queues sorted by distance;
    # a random permutation before the stable sorts makes equal-distance
    # candidates appear in uniformly random order.
    order = rng.permutation(k)
    order = order[np.argsort(f_dist[order], kind="stable")]
    order = order[np.argsort(f_assign[order], kind="stable")]
    ref_ids = np.arange(n_refs)
    starts = np.searchsorted(f_assign[order], ref_ids, side="left")
    ends = np.searchsorted(f_assign[order], ref_ids, side="right")
    cursor = starts.copy()
    remaining = ends - starts

    level = rho.astype(np.int64).copy()
    in_play = np.ones(n_refs, dtype=bool)
    selected = np.empty(needed, dtype=np.intp)
    count = 0
    while count < needed:
        if not in_play.any():
            raise RuntimeError("reference points exhausted before filling capacity")
        lvl = level[in_play].min()
        members = np.flatnonzero(in_play & (level == lvl))
        empties = members[remaining[members] == 0]
        nonempty = members[remaining[members] > 0]
        if count + nonempty.size < needed:
            # the whole round completes: every non-empty point contributes one
            if rho_positive == "random" and lvl > 0 and nonempty.size:
                _randomize_heads(order, cursor, remaining, nonempty, rng)
            if nonempty.size:
                selected[count : count + nonempty.size] = order[cursor[nonempty]]
                cursor[nonempty] += 1
                remaining[nonempty] -= 1
                level[nonempty] = lvl + 1
                count += nonempty.size
            in_play[empties] = False
        else:
            # final round: a random visiting order decides who still pops
            perm = rng.permutation(members)
            has_candidates = remaining[perm] > 0
            poppers = perm[has_candidates][: needed - count]
            if rho_positive == "random" and lvl > 0:
                _randomize_heads(order, cursor, remaining, poppers, rng)
            selected[count:] = order[cursor[poppers]]
            count = needed
    return selected


def _randomize_heads(order, cursor, remaining, ref_indices, rng) -> None:
    """Swap a uniformly random remaining candidate to each queue head."""
    offsets = rng.integers(0, remaining[ref_indices])
    head = cursor[ref_indices]
    pos = head + offsets
    head_vals = order[head].copy()
    order[head] = order[pos]
    order[pos] = head_vals


def survival_select(
    combined: Population,
    N: int,
    refs: ReferencePointSet,
    state: NormalizationState,
    rng: RandomSource,
    *,
    rho_positive: str = "random",
) -> tuple[Population, np.ndarray]:
    """Full survival selection on a combined population R_t.

    Returns the next population of size N and the reference point assignment
    of each of its members (under this generation's normalization).
    """
    partition = fast_nondominated_sort(combined)
    istar = critical_front_index(partition, N)
    z_idx = (
        np.concatenate(partition.fronts[: istar - 1])
        if istar > 1
        else np.empty(0, dtype=np.intp)
    )
    crit_idx = partition.fronts[istar - 1]

    fronts = [combined.objectives[f] for f in partition.fronts[:istar]]
    normalized, _ = normalize(fronts, state, rng)
    assoc = associate(normalized, refs, rng)

    z_pop = combined.take(z_idx)
    crit_pop = combined.take(crit_idx)
    picked = niching_select(
        z_pop, crit_pop, refs, assoc, N, rng, rho_positive=rho_positive
    )
    survivors = z_pop.concat(crit_pop.take(picked))
    assignments = np.concatenate(
        [assoc.assignments[: z_idx.size], assoc.assignments[z_idx.size :][picked]]
    )
    return survivors, assignments


@dataclass(frozen=True)
class GenerationTelemetry:
    evaluations: int
    mei: int
    covers_0n: bool
    covers_1n: bool
    active_refpoints: int


def nsga3_generation(
    pop: Population,
    benchmark,
    refs: ReferencePointSet,
    variation: VariationConfig,
    state: NormalizationState,
    rng: RandomSource,
    *,
    rho_positive: str = "random",
) -> tuple[Population, GenerationTelemetry]:
    """One full generation: offspring, sorting, normalization, association and
    niching selection; |P_{t+1}| = |P_t| and exactly |P_t| evaluations."""
    N = pop.size
    offspring = generate_offspring(pop, variation, rng, benchmark)
    combined = pop.concat(offspring)
    survivors, assignments = survival_select(
        combined, N, refs, state, rng, rho_positive=rho_positive
    )
    n = pop.n
    f1 = survivors.f1
    f2 = survivors.objectives[:, 1]
    telemetry = GenerationTelemetry(
        evaluations=N,
        mei=mei(f1, n),
        covers_0n=bool(np.any((f1 == 0) & (f2 == n))),
        covers_1n=bool(np.any((f1 == n) & (f2 == 0))),
        active_refpoints=int(np.unique(assignments).size),
    )
    return survivors, telemetry
