"""Reference-point niching evolutionary optimizer, crowding-distance
baselines, the maximum-empty-interval approximation metric, and a seeded
experiment harness on bi-objective pseudo-Boolean benchmarks."""

from .benchmarks import BenchmarkId, BenchmarkTag, lotz_eval, oneminmax_eval, pareto_front
from .core import (
    Individual,
    Population,
    RandomSource,
    dominates,
    random_bitstring,
    weakly_dominates,
)
from .harness import (
    Algorithm,
    ExperimentConfig,
    MonitorViolation,
    QuartileSummary,
    RunRecord,
    aggregate_quartiles,
    derive_seeds,
    detect_t_start,
    detect_t_start_lotz,
    experiment_matrix,
    resolve_t_max,
    run_single,
)
from .metrics import MeiReport, TheoryBounds, mei, mei_opt, population_report, theory_bounds
from .nsga2 import classic_survival, crowding_distance, sequential_survival, steady_state_step
from .nsga3 import (
    AssociationResult,
    NormalizationState,
    asf,
    associate,
    niching_select,
    normalize,
    nsga3_generation,
    survival_select,
)
from .refpoints import ReferencePointSet, das_dennis, divisions_for_count
from .sorting import FrontPartition, critical_front_index, fast_nondominated_sort
from .variation import VariationConfig, VariationScheme, generate_offspring

__version__ = "0.1.0"
