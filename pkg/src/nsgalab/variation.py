"""Offspring generation by bitwise mutation."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import Population, RandomSource

__all__ = ["VariationScheme", "VariationConfig", "generate_offspring"]


class VariationScheme(str, enum.Enum):
    # every parent produces exactly one offspring
    FAIR_BITWISE = "fair-bitwise"
    # each offspring's parent is drawn uniformly with replacement
    UNIFORM_PARENT_BITWISE = "uniform-parent-bitwise"


@dataclass(frozen=True)
class VariationConfig:
    """Mutation settings; ``mutation_rate=None`` resolves to 1/n at use.

    Rate 0 is allowed as a test-only override (offspring = parents bitwise).
    Crossover is reserved and must stay "none".
    """

    mutation_rate: float | None = None
    scheme: VariationScheme = VariationScheme.FAIR_BITWISE
    crossover: str = "none"

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", VariationScheme(self.scheme))
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"mutation rate must be in [0, 1], got {self.mutation_rate}")
        if self.crossover != "none":
            raise ValueError("crossover operators are not implemented")

    def resolved_rate(self, n: int) -> float:
        return 1.0 / n if self.mutation_rate is None else self.mutation_rate


def generate_offspring(
    pop: Population, cfg: VariationConfig, rng: RandomSource, benchmark
) -> Population:
    """Q_t with |Q_t| = |P_t|; consumes exactly |Q_t| fitness evaluations."""
    rate = cfg.resolved_rate(pop.n)
    if cfg.scheme is VariationScheme.FAIR_BITWISE:
        parents = pop.genotypes
    else:
        parents = pop.genotypes[rng.integers(0, pop.size, pop.size)]
    flips = rng.random((pop.size, pop.n)) < rate
    return Population.from_genotypes(parents ^ flips, benchmark)
