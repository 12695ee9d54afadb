"""Constructed scenarios and Monte Carlo estimators validating the survival
selection's probabilistic behavior beyond what the harness monitors cover.

Every randomized check derives one sub-seed per trial, so a reported failure
carries a seed that deterministically rebuilds the offending instance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .benchmarks import BenchmarkId, BenchmarkTag
from .core import Population, RandomSource
from .metrics import mei, mei_opt, theory_bounds
from .nsga3 import (
    NormalizationState,
    associate,
    niching_select,
    normalize,
    perpendicular_distances,
    survival_select,
)
from .refpoints import das_dennis, divisions_for_count
from .variation import VariationConfig, generate_offspring

__all__ = [
    "ScenarioBuilder",
    "ScenarioSpec",
    "ScenarioConstructionError",
    "LossEstimate",
    "DegradationEstimate",
    "LemmaReport",
    "build_unique_association_rt",
    "estimate_extremal_loss",
    "build_full_front_rt",
    "estimate_full_front_degradation",
    "check_lemma_properties",
    "validate_lemma",
]

SQRT2 = math.sqrt(2.0)
MAX_FAILURES_KEPT = 10


class ScenarioBuilder(str, enum.Enum):
    UNIQUE_ASSOCIATION = "unique-association"
    FULL_FRONT = "full-front"


class ScenarioConstructionError(ValueError):
    """A scenario's hypotheses could not be established."""


@dataclass(frozen=True)
class ScenarioSpec:
    n: int
    N: int
    builder: ScenarioBuilder
    trials: int = 10_000
    N_r: int | None = None  # None: grow until association is injective

    def __post_init__(self) -> None:
        object.__setattr__(self, "builder", ScenarioBuilder(self.builder))
        if self.builder is ScenarioBuilder.UNIQUE_ASSOCIATION:
            if self.N > (self.n + 1) / 2:
                raise ValueError("unique association requires N <= (n+1)/2")
        else:
            if self.n % 2 == 0:
                raise ValueError("full-front scenario requires odd n")
            if self.N != (self.n + 1) // 2:
                raise ValueError("full-front scenario requires N = (n+1)/2")
            if self.N_r is not None and self.N_r != 2 * self.N:
                raise ValueError("full-front scenario requires N_r = 2N")


def _step_genotypes(values: np.ndarray, n: int) -> np.ndarray:
    """Bitstrings 1^k 0^(n-k) realizing the given one-counts."""
    return (np.arange(n)[None, :] < values[:, None]).astype(np.uint8)


def build_unique_association_rt(spec: ScenarioSpec, rng: RandomSource):
    """Combined population of 2N individuals with distinct one-counts
    (including 0 and n) that associate injectively into the reference set.

    Returns (population, reference set, association). With ``spec.N_r`` unset,
    the reference point count doubles from 4N until association is injective;
    a given count that fails injectivity raises ScenarioConstructionError.
    """
    if spec.builder is not ScenarioBuilder.UNIQUE_ASSOCIATION:
        raise ValueError("spec does not describe a unique-association scenario")
    n, N = spec.n, spec.N
    k = 2 * N
    interior = rng.permutation(np.arange(1, n))[: k - 2]
    values = np.sort(np.concatenate([[0, n], interior]))
    if values.size != k or np.unique(values).size != k:
        raise ScenarioConstructionError("could not draw 2N distinct one-counts")
    bench = BenchmarkId(BenchmarkTag.ONEMINMAX, n)
    pop = Population.from_genotypes(_step_genotypes(values, n), bench)

    counts = [spec.N_r] if spec.N_r is not None else [4 * N * (2**i) for i in range(13)]
    for N_r in counts:
        refs = das_dennis(2, divisions_for_count(2, N_r))
        state = NormalizationState.initial(2)
        normalized, _ = normalize([pop.objectives], state, rng)
        assoc = associate(normalized, refs, rng)
        if np.unique(assoc.assignments).size == k:
            return pop, refs, assoc
    raise ScenarioConstructionError(
        f"association is not injective with N_r={counts[-1]}; raise N_r"
    )


@dataclass(frozen=True)
class LossEstimate:
    p_specific: float
    p_at_least_one: float
    p_both: float
    targets: tuple[float, float, float]
    trials: int
    N_r: int


def loss_targets(N: int) -> tuple[float, float, float]:
    """Removal probabilities for the unique-association scenario: one specific
    extremal, at least one, and both."""
    return (0.5, 0.75 + 1 / (4 * (2 * N - 1)), 0.25 - 1 / (4 * (2 * N - 1)))


def estimate_extremal_loss(
    spec: ScenarioSpec, trials: int | None = None, rng: RandomSource | None = None
) -> LossEstimate:
    """Empirical extremal-removal frequencies over repeated survival selections.

    The input population and its association are fixed; trial randomness comes
    only from the tie-breaking inside the selection.
    """
    rng = rng or RandomSource(0)
    trials = spec.trials if trials is None else trials
    pop, refs, assoc = build_unique_association_rt(spec, rng)
    n, N = spec.n, spec.N
    empty = Population(np.empty((0, n), dtype=np.uint8), np.empty((0, 2), dtype=np.int64))
    f1 = pop.f1
    lost0 = lostn = lost_any = lost_both = 0
    for _ in range(trials):
        picked = niching_select(empty, pop, refs, assoc, N, rng)
        kept = f1[picked]
        miss0 = 0 not in kept
        missn = n not in kept
        lost0 += miss0
        lostn += missn
        lost_any += miss0 or missn
        lost_both += miss0 and missn
    return LossEstimate(
        p_specific=lost0 / trials,
        p_at_least_one=lost_any / trials,
        p_both=lost_both / trials,
        targets=loss_targets(N),
        trials=trials,
        N_r=refs.size,
    )


def build_full_front_rt(spec: ScenarioSpec) -> Population:
    """One individual per front value 0..n (bitstrings 1^k 0^(n-k))."""
    if spec.builder is not ScenarioBuilder.FULL_FRONT:
        raise ValueError("spec does not describe a full-front scenario")
    n = spec.n
    values = np.arange(n + 1, dtype=np.int64)
    bench = BenchmarkId(BenchmarkTag.ONEMINMAX, n)
    return Population.from_genotypes(_step_genotypes(values, n), bench)


@dataclass(frozen=True)
class DegradationEstimate:
    mean_mei: float
    stderr: float
    trials: int
    n: int
    N: int
    N_r: int


def estimate_full_front_degradation(
    spec: ScenarioSpec, trials: int | None = None, rng: RandomSource | None = None
) -> DegradationEstimate:
    """Mean MEI of the population surviving one selection from a combined
    population that covers the full front, with N_r = 2N reference points."""
    rng = rng or RandomSource(0)
    trials = spec.trials if trials is None else trials
    pop = build_full_front_rt(spec)
    n, N = spec.n, spec.N
    N_r = 2 * N
    refs = das_dennis(2, divisions_for_count(2, N_r))
    state = NormalizationState.initial(2)
    normalized, _ = normalize([pop.objectives], state, rng)
    assoc = associate(normalized, refs, rng)
    empty = Population(np.empty((0, n), dtype=np.uint8), np.empty((0, 2), dtype=np.int64))
    f1 = pop.f1
    meis = np.empty(trials)
    for t in range(trials):
        picked = niching_select(empty, pop, refs, assoc, N, rng)
        assert picked.size == N
        meis[t] = mei(f1[picked], n)
    return DegradationEstimate(
        mean_mei=float(meis.mean()),
        stderr=float(meis.std(ddof=1) / math.sqrt(trials)),
        trials=trials,
        n=n,
        N=N,
        N_r=N_r,
    )


@dataclass
class LemmaReport:
    lemma: int
    trials: int
    violations: int
    failures: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "trials": self.trials,
            "violations": self.violations,
            "passed": self.passed,
            "failures": self.failures,
            "details": self.details,
        }


def _trial_seeds(rng: RandomSource, trials: int) -> np.ndarray:
    return rng.integers(0, 2**63 - 1, trials)


def _fresh_state() -> NormalizationState:
    return NormalizationState.initial(2)


def _random_oneminmax(trng: RandomSource, n: int, size: int, with_extremals: bool):
    bench = BenchmarkId(BenchmarkTag.ONEMINMAX, n)
    genos = trng.integers(0, 2, (size, n)).astype(np.uint8)
    if with_extremals:
        genos[0] = 0
        genos[1] = 1
    return Population.from_genotypes(genos, bench)


def _check_lemma_2(trials: int, rng: RandomSource) -> LemmaReport:
    """Minimum and maximum first-objective values of the combined population
    survive selection whenever N_r <= N < n+1."""
    report = LemmaReport(lemma=2, trials=trials, violations=0)
    for seed in _trial_seeds(rng, trials):
        trng = RandomSource(int(seed))
        n = int(trng.integers(6, 41))
        N = int(trng.integers(2, min(12, n) + 1))
        N_r = int(trng.integers(2, N + 1))
        combined = _random_oneminmax(trng, n, 2 * N, with_extremals=False)
        refs = das_dennis(2, divisions_for_count(2, N_r))
        survivors, _ = survival_select(combined, N, refs, _fresh_state(), trng)
        lo, hi = int(combined.f1.min()), int(combined.f1.max())
        if int(survivors.f1.min()) != lo or int(survivors.f1.max()) != hi:
            report.violations += 1
            if len(report.failures) < MAX_FAILURES_KEPT:
                report.failures.append(
                    {"seed": int(seed), "n": n, "N": N, "N_r": N_r,
                     "combined_f1": sorted(int(v) for v in combined.f1),
                     "survivor_f1": sorted(int(v) for v in survivors.f1)}
                )
    return report


def _check_lemma_4(trials: int, rng: RandomSource) -> LemmaReport:
    """With both extremal points present, normalization equals f/n."""
    report = LemmaReport(lemma=4, trials=trials, violations=0)
    worst = 0.0
    for seed in _trial_seeds(rng, trials):
        trng = RandomSource(int(seed))
        n = int(trng.integers(4, 61))
        size = int(trng.integers(2, 21)) + 2
        pop = _random_oneminmax(trng, n, size, with_extremals=True)
        normalized, _ = normalize([pop.objectives], _fresh_state(), trng)
        err = float(np.abs(normalized - pop.objectives / n).max())
        worst = max(worst, err)
        if err > 1e-12:
            report.violations += 1
            if len(report.failures) < MAX_FAILURES_KEPT:
                report.failures.append({"seed": int(seed), "n": n, "error": err})
    report.details["max_abs_error"] = worst
    return report


def _check_lemma_5(trials: int, rng: RandomSource) -> LemmaReport:
    """With extremals present and N_r <= N, every individual's association
    satisfies |f1_normalized - r_1| <= (2 - sqrt(2)) / (N_r - 1)."""
    report = LemmaReport(lemma=5, trials=trials, violations=0)
    worst_excess = -math.inf
    for seed in _trial_seeds(rng, trials):
        trng = RandomSource(int(seed))
        n = int(trng.integers(20, 61))
        N_r = int(trng.integers(2, 13))
        N = int(trng.integers(N_r, 17))
        pop = _random_oneminmax(trng, n, N, with_extremals=True)
        refs = das_dennis(2, divisions_for_count(2, N_r))
        normalized, _ = normalize([pop.objectives], _fresh_state(), trng)
        assoc = associate(normalized, refs, trng)
        bound = (2.0 - SQRT2) / (N_r - 1)
        gap = np.abs(normalized[:, 0] - refs.points[assoc.assignments, 0])
        worst_excess = max(worst_excess, float((gap - bound).max()))
        if np.any(gap > bound + 1e-12):
            report.violations += 1
            if len(report.failures) < MAX_FAILURES_KEPT:
                report.failures.append(
                    {"seed": int(seed), "n": n, "N": N, "N_r": N_r,
                     "max_gap": float(gap.max()), "bound": bound}
                )
    report.details["worst_excess_over_bound"] = worst_excess
    return report


def _check_lemma_6(trials: int, rng: RandomSource) -> LemmaReport:
    """With extremals present and N_r <= N, the set of active reference
    points never loses a member across generations.

    Instances are restricted to tie-free associations (odd n plus an explicit
    tie check): an exact distance tie re-randomized in a later generation can
    legitimately move a point's single associate elsewhere, which is outside
    the deterministic-association reading of the claim.
    """
    report = LemmaReport(lemma=6, trials=trials, violations=0)
    resamples = 0
    completed = 0
    var = VariationConfig()
    while completed < trials:
        trng = RandomSource(int(rng.integers(0, 2**63 - 1)))
        n = 2 * int(trng.integers(4, 16)) + 1
        N = int(trng.integers(4, min(12, n) + 1))
        N_r = int(trng.integers(2, N + 1))
        bench = BenchmarkId(BenchmarkTag.ONEMINMAX, n)
        pop = _random_oneminmax(trng, n, N, with_extremals=True)
        refs = das_dennis(2, divisions_for_count(2, N_r))
        state = _fresh_state()
        state.observe(pop.objectives)
        prev_active: set[int] | None = None
        tie_hit = False
        history = []
        for _ in range(3):
            offspring = generate_offspring(pop, var, trng, bench)
            combined = pop.concat(offspring)
            normalized, _ = normalize([combined.objectives], state, trng)
            dist = perpendicular_distances(normalized, refs)
            if np.any((dist == dist.min(axis=1)[:, None]).sum(axis=1) > 1):
                tie_hit = True
                break
            assoc = associate(normalized, refs, trng)
            empty = Population(
                np.empty((0, n), dtype=np.uint8), np.empty((0, 2), dtype=np.int64)
            )
            picked = niching_select(empty, combined, refs, assoc, N, trng)
            pop = combined.take(picked)
            active = set(int(r) for r in np.unique(assoc.assignments[picked]))
            history.append(sorted(active))
            if prev_active is not None and not prev_active.issubset(active):
                report.violations += 1
                if len(report.failures) < MAX_FAILURES_KEPT:
                    report.failures.append(
                        {"seed": trng.seed, "n": n, "N": N, "N_r": N_r,
                         "active_history": history}
                    )
                break
            prev_active = active
        if tie_hit:
            resamples += 1
            continue
        completed += 1
    report.details["tie_resamples"] = resamples
    return report


def _check_lemma_8(trials: int, rng: RandomSource) -> LemmaReport:
    """With extremals present and every reference point active, the population
    MEI is at most ceil((5 - 2*sqrt(2)) n / (N_r - 1))."""
    report = LemmaReport(lemma=8, trials=trials, violations=0)
    resamples = 0
    completed = 0
    while completed < trials:
        trng = RandomSource(int(rng.integers(0, 2**63 - 1)))
        n = int(trng.integers(20, 61))
        N_r = int(trng.integers(2, 11))
        refs = das_dennis(2, divisions_for_count(2, N_r))
        anchor = np.rint(refs.points[:, 0] * n).astype(np.int64)
        extra = trng.integers(0, n + 1, int(trng.integers(0, 6)))
        values = np.concatenate([[0, n], anchor, extra])
        bench = BenchmarkId(BenchmarkTag.ONEMINMAX, n)
        pop = Population.from_genotypes(_step_genotypes(values, n), bench)
        normalized, _ = normalize([pop.objectives], _fresh_state(), trng)
        assoc = associate(normalized, refs, trng)
        if np.unique(assoc.assignments).size < N_r:
            resamples += 1
            continue
        completed += 1
        bound = theory_bounds(n, max(pop.size, 2), N_r).mei_upper
        value = mei(pop.f1, n)
        if value > bound:
            report.violations += 1
            if len(report.failures) < MAX_FAILURES_KEPT:
                report.failures.append(
                    {"seed": trng.seed, "n": n, "N_r": N_r, "mei": value,
                     "bound": bound, "values": sorted(int(v) for v in values)}
                )
    report.details["hypothesis_resamples"] = resamples
    return report


_CHECKS = {2: _check_lemma_2, 4: _check_lemma_4, 5: _check_lemma_5,
           6: _check_lemma_6, 8: _check_lemma_8}


def check_lemma_properties(lemma: int, trials: int, rng: RandomSource) -> LemmaReport:
    """Randomized hypothesis-satisfying instances asserting one lemma's
    conclusion exactly; the report counts trials and violations."""
    if lemma not in _CHECKS:
        raise ValueError(f"no property check for lemma {lemma}; choose from {sorted(_CHECKS)}")
    return _CHECKS[lemma](trials, rng)


DEGRADATION_GRID = (51, 101, 201, 401)


def validate_lemma(lemma: int, trials: int | None = None, seed: int = 0) -> dict:
    """JSON-ready validation report for one lemma (CLI surface)."""
    rng = RandomSource(seed)
    if lemma in _CHECKS:
        report = check_lemma_properties(lemma, trials or 10_000, rng)
        return report.to_json()
    if lemma == 9:
        spec = ScenarioSpec(n=9, N=5, builder=ScenarioBuilder.UNIQUE_ASSOCIATION)
        est = estimate_extremal_loss(spec, trials or 100_000, rng)
        estimates = (est.p_specific, est.p_at_least_one, est.p_both)
        passed = all(abs(e - t) <= 0.01 for e, t in zip(estimates, est.targets))
        return {
            "lemma": 9,
            "trials": est.trials,
            "violations": 0 if passed else 1,
            "passed": passed,
            "failures": [],
            "details": {
                "scenario": {"n": spec.n, "N": spec.N, "N_r": est.N_r},
                "estimates": list(estimates),
                "targets": list(est.targets),
                "tolerance": 0.01,
            },
        }
    if lemma == 10:
        per_n = trials or 10_000
        estimates = []
        for n in DEGRADATION_GRID:
            spec = ScenarioSpec(n=n, N=(n + 1) // 2, builder=ScenarioBuilder.FULL_FRONT,
                                trials=per_n)
            estimates.append(estimate_full_front_degradation(spec, rng=rng))
        means = [e.mean_mei for e in estimates]
        increasing = all(a < b for a, b in zip(means, means[1:]))
        last = estimates[-1]
        separated = last.mean_mei >= 2 * mei_opt(last.N, last.n)
        passed = increasing and separated
        return {
            "lemma": 10,
            "trials": per_n,
            "violations": 0 if passed else 1,
            "passed": passed,
            "failures": [],
            "details": {
                "grid": list(DEGRADATION_GRID),
                "mean_mei": means,
                "stderr": [e.stderr for e in estimates],
                "monotone_increasing": increasing,
                "mean_at_largest_n": last.mean_mei,
                "twice_mei_opt": 2 * mei_opt(last.N, last.n),
            },
        }
    raise ValueError(f"unknown lemma {lemma}; choose from 2,4,5,6,8,9,10")
