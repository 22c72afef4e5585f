"""Genetic-algorithm search for per-class SAMME.C2 costs.

Fitness is the validation G-mean of a SAMME.C2 ensemble trained with the
candidate costs. Each generation keeps the ``elitism_count`` best
individuals unchanged and fills the rest with children bred by tournament
selection, uniform crossover and clipped Gaussian mutation.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .boosting import BoostConfig, CostVector, Variant, fit
from .data import Dataset, stratified_split
from .metrics import evaluate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 20
    generations: int = 30
    tournament_size: int = 3
    mutation_sigma: float = 0.1
    elitism_count: int = 2
    fitness_rounds: int = 50
    validation_fraction: float = 0.2
    seed: int = 0
    cost_floor: float = 1e-3
    n_jobs: int = 1

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.generations < 0:
            raise ValueError("generations cannot be negative")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be positive")
        if self.mutation_sigma < 0:
            raise ValueError("mutation_sigma cannot be negative")
        if not 0 <= self.elitism_count < self.population_size:
            raise ValueError("elitism_count must be in [0, population_size)")
        if self.fitness_rounds < 1:
            raise ValueError("fitness_rounds must be positive")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in (0, 1)")
        if not 0.0 < self.cost_floor <= 1.0:
            raise ValueError("cost_floor must be in (0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class GAResult:
    best_costs: np.ndarray
    best_fitness: float
    history: list[float] = field(default_factory=list)
    mean_history: list[float] = field(default_factory=list)
    populations: list[np.ndarray] = field(default_factory=list, repr=False)


def evaluate_fitness(costs, train: Dataset, valid: Dataset, cfg: GAConfig) -> float:
    """Validation G-mean of SAMME.C2 trained on ``train`` with ``costs``."""
    boost = BoostConfig(
        variant=Variant.SAMME_C2,
        T=cfg.fitness_rounds,
        costs=CostVector(tuple(costs)),
        seed=cfg.seed,
    )
    ens = fit(train, boost)
    if not ens.members:
        return 0.0
    return evaluate(valid.labels, ens.predict(valid.features), valid.K).gmean


def initial_population(K: int, cfg: GAConfig) -> np.ndarray:
    """Uniform-cost individual first, the rest uniform on ``(0, 1]``."""
    rng = np.random.default_rng([cfg.seed, 0xC057])
    pop = 1.0 - rng.random((cfg.population_size, K))
    pop[0] = 1.0
    return np.clip(pop, cfg.cost_floor, 1.0)


def _tournament(fitness: np.ndarray, size: int, rng: np.random.Generator) -> int:
    entrants = rng.choice(len(fitness), size=min(size, len(fitness)), replace=False)
    # highest fitness wins; lower population index on ties
    return int(min(entrants, key=lambda i: (-fitness[i], i)))


def breed(pop: np.ndarray, fitness: np.ndarray, cfg: GAConfig, generation: int, index: int) -> np.ndarray:
    rng = np.random.default_rng([cfg.seed, generation, index])
    a = pop[_tournament(fitness, cfg.tournament_size, rng)]
    b = pop[_tournament(fitness, cfg.tournament_size, rng)]
    child = np.where(rng.random(pop.shape[1]) < 0.5, a, b)
    if cfg.mutation_sigma > 0:
        child = child + rng.normal(0.0, cfg.mutation_sigma, size=child.shape)
    return np.clip(child, cfg.cost_floor, 1.0)


def ga_search(train: Dataset, cfg: GAConfig, initial=None, fitness_fn=None) -> GAResult:
    """Search per-class costs maximising validation G-mean.

    ``train`` is split (stratified) into a fitting part and a validation
    part. ``history[g]`` is the best fitness in generation ``g``
    (generation 0 is the initial population), which elitism keeps
    non-decreasing. ``fitness_fn(costs)`` overrides the boosting-based
    fitness, mainly for testing.
    """
    if fitness_fn is None:
        fit_part, valid_part = stratified_split(
            train, 1.0 - cfg.validation_fraction, cfg.seed
        )

        def fitness_fn(costs):
            return evaluate_fitness(costs, fit_part, valid_part, cfg)

    pop = initial_population(train.K, cfg) if initial is None else np.array(initial, dtype=np.float64)
    if pop.shape != (cfg.population_size, train.K):
        raise ValueError(f"initial population must have shape ({cfg.population_size}, {train.K})")
    if np.any(pop <= 0) or np.any(pop > 1):
        raise ValueError("initial costs must lie in (0, 1]")

    cache: dict[tuple, float] = {}
    pool = ThreadPoolExecutor(cfg.n_jobs) if cfg.n_jobs > 1 else None

    def score(population):
        keys = [tuple(row) for row in population]
        todo = [k for k in dict.fromkeys(keys) if k not in cache]
        if pool is not None:
            results = list(pool.map(fitness_fn, [np.array(k) for k in todo]))
        else:
            results = [fitness_fn(np.array(k)) for k in todo]
        cache.update(zip(todo, results))
        return np.array([cache[k] for k in keys])

    result = GAResult(best_costs=pop[0].copy(), best_fitness=-np.inf)
    try:
        for gen in range(cfg.generations + 1):
            fitness = score(pop)
            result.populations.append(pop.copy())
            best = int(np.argmax(fitness))
            if fitness[best] > result.best_fitness:
                result.best_fitness = float(fitness[best])
                result.best_costs = pop[best].copy()
            result.history.append(float(fitness[best]))
            result.mean_history.append(float(fitness.mean()))
            log.info("generation %d: best %.4f mean %.4f", gen, fitness[best], fitness.mean())
            if gen == cfg.generations:
                break
            ranked = np.argsort(-fitness, kind="stable")
            nxt = [pop[i].copy() for i in ranked[: cfg.elitism_count]]
            for idx in range(cfg.elitism_count, cfg.population_size):
                nxt.append(breed(pop, fitness, cfg, gen + 1, idx))
            pop = np.array(nxt)
    finally:
        if pool is not None:
            pool.shutdown()
    return result
