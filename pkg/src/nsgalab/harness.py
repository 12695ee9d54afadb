"""Experiment orchestration: seeded runs with per-generation telemetry,
start-generation bookkeeping, pooled quartile aggregation and persistence.

Measurement windows are aligned at each run's start generation: the window
[a..b] pools the MEI values of generations start+a .. start+b. Runs whose
configuration cannot attain the start condition (more reference points than
population slots) are measured from the maximal start generation observed in
the attainable configurations of the same group.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .benchmarks import BenchmarkId, BenchmarkTag
from .core import Population, RandomSource
from .metrics import mei, population_report, theory_bounds
from .nsga2 import classic_survival, sequential_survival, steady_state_step
from .nsga3 import NormalizationState, nsga3_generation
from .refpoints import das_dennis, divisions_for_count
from .variation import VariationConfig, generate_offspring

__all__ = [
    "Algorithm",
    "ExperimentConfig",
    "RunRecord",
    "QuartileSummary",
    "MonitorViolation",
    "derive_seeds",
    "run_single",
    "detect_t_start",
    "detect_t_start_lotz",
    "resolve_t_max",
    "aggregate_quartiles",
    "experiment_matrix",
    "write_run_csv",
    "read_run_csv",
]

DEFAULT_MASTER_SEED = 20240601
DEFAULT_RUNS = 20
HARD_CAP = 100_000

CSV_COLUMNS = (
    "run_id",
    "seed",
    "generation",
    "mei",
    "covers_0n",
    "covers_1n",
    "active_refpoints",
    "evaluations",
)


class Algorithm(str, enum.Enum):
    NSGA3 = "nsga3"
    NSGA2_CLASSIC = "nsga2-classic"
    NSGA2_SEQUENTIAL = "nsga2-seq"
    NSGA2_STEADY = "nsga2-steady"


class MonitorViolation(RuntimeError):
    """A run violated one of the hard telemetry monitors."""


@dataclass(frozen=True)
class ExperimentConfig:
    benchmark: BenchmarkId
    N: int
    N_r: int
    algorithm: Algorithm = Algorithm.NSGA3
    seeds: tuple[int, ...] = ()
    max_generations: int = HARD_CAP
    windows: tuple[tuple[int, int], ...] = ((1, 100), (3001, 3100))
    t_start_rule: str = "coverage"  # or "coverage+mei"
    variation: VariationConfig = field(default_factory=VariationConfig)
    rho_positive: str = "random"
    eps_nad: float = 1e-6
    asf_eps: float = 1e-6
    monitors: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if self.N < 2:
            raise ValueError(f"population size must be >= 2, got {self.N}")
        if self.N >= self.benchmark.n + 1:
            raise ValueError(
                f"approximation regime requires N < n+1 (N={self.N}, n={self.benchmark.n})"
            )
        if self.N_r < 2:
            raise ValueError(f"reference point count must be >= 2, got {self.N_r}")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be pairwise distinct")
        if self.t_start_rule not in ("coverage", "coverage+mei"):
            raise ValueError(f"unknown start rule: {self.t_start_rule!r}")
        if not self.windows or any(not 1 <= a <= b for a, b in self.windows):
            raise ValueError(f"invalid measurement windows: {self.windows}")
        if self.max_generations < 1:
            raise ValueError("max_generations must be positive")

    @property
    def label(self) -> str:
        base = f"{self.algorithm.value}-{self.benchmark.tag.value}-n{self.benchmark.n}-N{self.N}"
        if self.algorithm is Algorithm.NSGA3:
            return f"{base}-Nr{self.N_r}"
        return base

    @property
    def post_start_horizon(self) -> int:
        return max(b for _, b in self.windows)

    @property
    def mei_start_target(self) -> int:
        return -(-self.benchmark.n // (self.N_r - 1))


@dataclass
class RunRecord:
    """Per-generation telemetry of one run (row 0 is the initial population)."""

    label: str
    seed: int
    generations: np.ndarray
    mei: np.ndarray
    covers_0n: np.ndarray
    covers_1n: np.ndarray
    active_refpoints: np.ndarray
    evaluations: np.ndarray
    t_start: int | None = None
    resolved_t_start: int | None = None

    @property
    def coverage_t_start(self) -> int | None:
        both = self.covers_0n & self.covers_1n
        hits = np.flatnonzero(both)
        return int(hits[0]) if hits.size else None

    @property
    def lost_extremals(self) -> bool:
        """True if extremal coverage was ever lost after being attained."""
        start = self.coverage_t_start
        if start is None:
            return False
        both = self.covers_0n & self.covers_1n
        return not bool(both[start:].all())


def derive_seeds(master_seed: int, count: int) -> tuple[int, ...]:
    """Run seeds from a master seed via numpy's SeedSequence state expansion."""
    state = np.random.SeedSequence(master_seed).generate_state(count, dtype=np.uint64)
    return tuple(int(s) for s in state)


def _rule_hit(cfg: ExperimentConfig, mei_value: int, c0: bool, c1: bool) -> bool:
    if not (c0 and c1):
        return False
    if cfg.t_start_rule == "coverage":
        return True
    return mei_value == cfg.mei_start_target


def run_single(
    cfg: ExperimentConfig, seed: int, *, fixed_horizon: int | None = None
) -> RunRecord:
    """Execute one seeded run.

    Without ``fixed_horizon`` the run stops ``post_start_horizon`` generations
    after the start rule first holds (or at the hard cap). With it, exactly
    ``fixed_horizon`` generations are executed.
    """
    bench = cfg.benchmark
    n = bench.n
    rng = RandomSource(seed)
    pop = Population.from_genotypes(
        rng.integers(0, 2, (cfg.N, n)).astype(np.uint8), bench
    )
    evaluations = cfg.N

    is_nsga3 = cfg.algorithm is Algorithm.NSGA3
    refs = None
    state = None
    if is_nsga3:
        refs = das_dennis(2, divisions_for_count(2, cfg.N_r))
        state = NormalizationState.initial(2, cfg.eps_nad, cfg.asf_eps)
        state.observe(pop.objectives)

    gens: list[int] = []
    meis: list[int] = []
    c0s: list[bool] = []
    c1s: list[bool] = []
    actives: list[int] = []
    evals: list[int] = []

    def record(gen: int, mei_value: int, c0: bool, c1: bool, active: int) -> None:
        gens.append(gen)
        meis.append(mei_value)
        c0s.append(c0)
        c1s.append(c1)
        actives.append(active)
        evals.append(evaluations)

    f1 = pop.f1
    f2 = pop.objectives[:, 1]
    c0 = bool(np.any((f1 == 0) & (f2 == n)))
    c1 = bool(np.any((f1 == n) & (f2 == 0)))
    if is_nsga3:
        active0 = population_report(pop, refs, n, rng=rng).active_refpoints
    else:
        active0 = 0
    mei0 = mei(f1, n)
    record(0, mei0, c0, c1, active0)

    # first generation satisfying the start rule; anchors both the stopping
    # horizon and the hard monitors (the monitored claims assume the
    # post-start population state)
    start_gen = 0 if _rule_hit(cfg, mei0, c0, c1) else None
    prev_active = active0
    monitors_on = cfg.monitors and is_nsga3 and cfg.N_r <= cfg.N
    bounds = theory_bounds(n, cfg.N, cfg.N_r) if is_nsga3 else None

    gen = 0
    while True:
        gen += 1
        if is_nsga3:
            pop, telem = nsga3_generation(
                pop, bench, refs, cfg.variation, state, rng,
                rho_positive=cfg.rho_positive,
            )
            evaluations += telem.evaluations
            mei_g, c0, c1, active = telem.mei, telem.covers_0n, telem.covers_1n, telem.active_refpoints
        else:
            if cfg.algorithm is Algorithm.NSGA2_STEADY:
                pop = steady_state_step(pop, bench, cfg.variation, rng)
                evaluations += 1
            else:
                offspring = generate_offspring(pop, cfg.variation, rng, bench)
                combined = pop.concat(offspring)
                evaluations += offspring.size
                if cfg.algorithm is Algorithm.NSGA2_CLASSIC:
                    pop = classic_survival(combined, cfg.N, rng)
                else:
                    pop = sequential_survival(combined, cfg.N, rng)
            f1 = pop.f1
            f2 = pop.objectives[:, 1]
            mei_g = mei(f1, n)
            c0 = bool(np.any((f1 == 0) & (f2 == n)))
            c1 = bool(np.any((f1 == n) & (f2 == 0)))
            active = 0
        record(gen, mei_g, c0, c1, active)

        covered = c0 and c1
        if start_gen is None and _rule_hit(cfg, mei_g, c0, c1):
            start_gen = gen
        if monitors_on and start_gen is not None and gen > start_gen:
            if not covered:
                raise MonitorViolation(
                    f"{cfg.label} seed={seed}: extremal coverage lost at generation {gen}"
                )
            if active < prev_active:
                raise MonitorViolation(
                    f"{cfg.label} seed={seed}: active reference points dropped "
                    f"{prev_active} -> {active} at generation {gen}"
                )
            if active == cfg.N_r and mei_g > bounds.mei_upper:
                raise MonitorViolation(
                    f"{cfg.label} seed={seed}: MEI {mei_g} exceeds bound "
                    f"{bounds.mei_upper} at generation {gen}"
                )
        prev_active = active

        if fixed_horizon is not None:
            if gen >= fixed_horizon:
                break
        else:
            if start_gen is not None and gen >= start_gen + cfg.post_start_horizon:
                break
            if gen >= cfg.max_generations:
                break

    record_arr = RunRecord(
        label=cfg.label,
        seed=seed,
        generations=np.asarray(gens, dtype=np.int64),
        mei=np.asarray(meis, dtype=np.int64),
        covers_0n=np.asarray(c0s, dtype=bool),
        covers_1n=np.asarray(c1s, dtype=bool),
        active_refpoints=np.asarray(actives, dtype=np.int64),
        evaluations=np.asarray(evals, dtype=np.int64),
    )
    if cfg.t_start_rule == "coverage":
        record_arr.t_start = detect_t_start(record_arr)
    else:
        record_arr.t_start = detect_t_start_lotz(record_arr, n, cfg.N_r)
    return record_arr


def detect_t_start(record: RunRecord) -> int | None:
    """First generation whose population covers both extremal points."""
    return record.coverage_t_start


def detect_t_start_lotz(record: RunRecord, n: int, N_r: int) -> int | None:
    """First generation with both extremal points and MEI == ceil(n/(N_r-1))."""
    target = -(-n // (N_r - 1))
    hit = record.covers_0n & record.covers_1n & (record.mei == target)
    hits = np.flatnonzero(hit)
    return int(hits[0]) if hits.size else None


def resolve_t_max(t_starts: Iterable[int | None]) -> int:
    """Maximum start generation over runs of the attainable configurations."""
    values = list(t_starts)
    if not values:
        raise ValueError("no runs available to resolve the start-generation maximum")
    if any(v is None for v in values):
        raise ValueError(
            "a run never satisfied its start condition; raise max_generations"
        )
    return max(int(v) for v in values)


@dataclass(frozen=True)
class QuartileSummary:
    q1: float
    q2: float
    q3: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.q1, self.q2, self.q3)


def aggregate_quartiles(
    records: Sequence[RunRecord], window: tuple[int, int]
) -> QuartileSummary:
    """Pool the MEI of generations start+a .. start+b across all records and
    return sample quartiles with linear interpolation."""
    a, b = window
    pooled: list[np.ndarray] = []
    for rec in records:
        if rec.resolved_t_start is None:
            raise ValueError(f"run {rec.label} seed={rec.seed} has no resolved start")
        lo = rec.resolved_t_start + a
        hi = rec.resolved_t_start + b
        mask = (rec.generations >= lo) & (rec.generations <= hi)
        pooled.append(rec.mei[mask])
    sample = np.concatenate(pooled) if pooled else np.empty(0)
    if sample.size == 0:
        raise ValueError(f"window {window} pooled no generations")
    q1, q2, q3 = np.percentile(sample, [25, 50, 75])
    return QuartileSummary(float(q1), float(q2), float(q3))


def write_run_csv(record: RunRecord, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for i in range(record.generations.size):
            writer.writerow(
                [
                    record.label,
                    record.seed,
                    int(record.generations[i]),
                    int(record.mei[i]),
                    int(record.covers_0n[i]),
                    int(record.covers_1n[i]),
                    int(record.active_refpoints[i]),
                    int(record.evaluations[i]),
                ]
            )


def read_run_csv(path: Path) -> RunRecord:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header {header}")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    label = rows[0][0]
    seed = int(rows[0][1])
    cols = np.array([[int(v) for v in row[2:]] for row in rows], dtype=np.int64)
    return RunRecord(
        label=label,
        seed=seed,
        generations=cols[:, 0],
        mei=cols[:, 1],
        covers_0n=cols[:, 2].astype(bool),
        covers_1n=cols[:, 3].astype(bool),
        active_refpoints=cols[:, 4],
        evaluations=cols[:, 5],
    )


def _run_task(task: tuple[ExperimentConfig, int, int | None]) -> RunRecord:
    cfg, seed, fixed_horizon = task
    return run_single(cfg, seed, fixed_horizon=fixed_horizon)


def _execute(
    tasks: list[tuple[ExperimentConfig, int, int | None]], jobs: int
) -> list[RunRecord]:
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks, chunksize=1))


def _ref_settings(N: int) -> list[int]:
    return [math.ceil(N / 4), math.ceil(N / 2), N, 2 * N, 4 * N, 8 * N]


def experiment_matrix(
    table: str,
    out_dir: str | Path,
    *,
    master_seed: int = DEFAULT_MASTER_SEED,
    seeds: Sequence[int] | None = None,
    runs: int = DEFAULT_RUNS,
    n: int | None = None,
    pop_sizes: Sequence[int] | None = None,
    ref_point_settings: Sequence[int] | None = None,
    algorithms: Sequence[Algorithm | str] | None = None,
    benchmark_tag: BenchmarkTag | str | None = None,
    windows: Sequence[tuple[int, int]] | None = None,
    t_start_rule: str | None = None,
    max_generations: int = HARD_CAP,
    variation: VariationConfig | None = None,
    rho_positive: str = "random",
    monitors: bool = True,
    jobs: int = 1,
) -> dict:
    """Run a full experiment table and persist CSVs plus JSON summaries.

    Table "1": bi-objective one/zero counting, n=601, N in {301, 151, 76},
    the six reference point settings plus the sequential-removal baseline,
    windows [1..100] and [3001..3100]. Table "2": prefix/suffix benchmark,
    n=120, N in {61, 31, 16}, window [1..1000] with the coverage+MEI start
    rule. "custom" uses the keyword arguments as given.
    """
    table = str(table)
    if table == "1":
        tag = BenchmarkTag.ONEMINMAX
        n = 601 if n is None else n
        pop_sizes = (301, 151, 76) if pop_sizes is None else tuple(pop_sizes)
        windows = ((1, 100), (3001, 3100)) if windows is None else tuple(windows)
        t_start_rule = "coverage" if t_start_rule is None else t_start_rule
        baselines = [Algorithm.NSGA2_SEQUENTIAL]
    elif table == "2":
        tag = BenchmarkTag.LOTZ
        n = 120 if n is None else n
        pop_sizes = (61, 31, 16) if pop_sizes is None else tuple(pop_sizes)
        windows = ((1, 1000),) if windows is None else tuple(windows)
        t_start_rule = "coverage+mei" if t_start_rule is None else t_start_rule
        baselines = []
    elif table == "custom":
        if benchmark_tag is None or n is None or pop_sizes is None:
            raise ValueError("custom tables need benchmark_tag, n and pop_sizes")
        tag = BenchmarkTag(benchmark_tag)
        pop_sizes = tuple(pop_sizes)
        windows = ((1, 100),) if windows is None else tuple(windows)
        t_start_rule = "coverage" if t_start_rule is None else t_start_rule
        baselines = []
    else:
        raise ValueError(f"unknown table {table!r}")
    if algorithms is not None:
        baselines = [Algorithm(a) for a in algorithms if Algorithm(a) is not Algorithm.NSGA3]

    bench = BenchmarkId(tag, n)
    seeds = derive_seeds(master_seed, runs) if seeds is None else tuple(int(s) for s in seeds)
    variation = variation or VariationConfig()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    base_cfg = dict(
        benchmark=bench,
        seeds=tuple(seeds),
        max_generations=max_generations,
        windows=tuple(windows),
        t_start_rule=t_start_rule,
        variation=variation,
        rho_positive=rho_positive,
        monitors=monitors,
    )

    summary: dict = {
        "table": table,
        "benchmark": tag.value,
        "n": n,
        "master_seed": master_seed,
        "seeds": list(seeds),
        "windows": [list(w) for w in windows],
        "t_start_rule": t_start_rule,
        "groups": [],
    }

    for N in pop_sizes:
        settings = (
            list(ref_point_settings) if ref_point_settings is not None else _ref_settings(N)
        )
        low = [nr for nr in settings if nr <= N]
        high = [nr for nr in settings if nr > N]

        phase1: list[ExperimentConfig] = [
            ExperimentConfig(N=N, N_r=nr, algorithm=Algorithm.NSGA3, **base_cfg)
            for nr in low
        ]
        phase1 += [
            ExperimentConfig(N=N, N_r=N, algorithm=alg, **base_cfg) for alg in baselines
        ]
        tasks = [(cfg, seed, None) for cfg in phase1 for seed in seeds]
        records = _execute(tasks, jobs)
        by_cfg: dict[str, list[RunRecord]] = {}
        for rec in records:
            by_cfg.setdefault(rec.label, []).append(rec)

        nsga3_starts = [
            rec.t_start
            for cfg in phase1
            if cfg.algorithm is Algorithm.NSGA3
            for rec in by_cfg[cfg.label]
        ]
        t_max = resolve_t_max(nsga3_starts) if nsga3_starts else None

        phase2 = [
            ExperimentConfig(N=N, N_r=nr, algorithm=Algorithm.NSGA3, **base_cfg)
            for nr in high
        ]
        if phase2:
            if t_max is None:
                raise ValueError(
                    "reference point settings above N need an attainable setting "
                    "to resolve the measurement start"
                )
            horizon = t_max + max(b for _, b in windows)
            tasks = [(cfg, seed, horizon) for cfg in phase2 for seed in seeds]
            for rec in _execute(tasks, jobs):
                by_cfg.setdefault(rec.label, []).append(rec)

        group: dict = {"N": N, "t_max": t_max, "configs": []}
        for cfg in phase1 + phase2:
            recs = by_cfg[cfg.label]
            attainable = cfg in phase1
            for rec in recs:
                if attainable:
                    rec.resolved_t_start = rec.t_start
                else:
                    usable = rec.t_start is not None and not rec.lost_extremals
                    rec.resolved_t_start = rec.t_start if usable else t_max
                if rec.resolved_t_start is None:
                    raise ValueError(
                        f"{rec.label} seed={rec.seed} never satisfied the start "
                        "condition; raise max_generations"
                    )
            cfg_dir = out_dir / "runs" / cfg.label
            run_infos = []
            for rec in recs:
                path = cfg_dir / f"{rec.seed}.csv"
                write_run_csv(rec, path)
                run_infos.append(
                    {
                        "seed": rec.seed,
                        "csv": str(path.relative_to(out_dir)),
                        "t_start": rec.t_start,
                        "resolved_t_start": rec.resolved_t_start,
                        "lost_extremals": rec.lost_extremals,
                    }
                )
            quartiles = {
                f"{a}..{b}": list(aggregate_quartiles(recs, (a, b)).as_tuple())
                for a, b in windows
            }
            group["configs"].append(
                {
                    "label": cfg.label,
                    "algorithm": cfg.algorithm.value,
                    "N": cfg.N,
                    "N_r": cfg.N_r if cfg.algorithm is Algorithm.NSGA3 else None,
                    "quartiles": quartiles,
                    "t_start": [rec.t_start for rec in recs],
                    "resolved_t_start": [rec.resolved_t_start for rec in recs],
                    "runs": run_infos,
                }
            )
        summary["groups"].append(group)

    config_echo = {
        "table": table,
        "benchmark": tag.value,
        "n": n,
        "pop_sizes": list(pop_sizes),
        "ref_point_settings": (
            list(ref_point_settings) if ref_point_settings is not None else
            {str(N): _ref_settings(N) for N in pop_sizes}
        ),
        "baselines": [alg.value for alg in baselines],
        "master_seed": master_seed,
        "seeds": list(seeds),
        "seed_rule": "numpy SeedSequence(master_seed).generate_state(runs, uint64)",
        "windows": [list(w) for w in windows],
        "t_start_rule": t_start_rule,
        "max_generations": max_generations,
        "variation": {
            "scheme": variation.scheme.value,
            "mutation_rate": variation.mutation_rate,
            "crossover": variation.crossover,
        },
        "rho_positive": rho_positive,
        "eps_nad": 1e-6,
        "asf_eps": 1e-6,
        "monitors": monitors,
        "jobs": jobs,
    }
    with open(out_dir / "config.json", "w") as fh:
        json.dump(config_echo, fh, indent=2)
        fh.write("\n")
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return summary
