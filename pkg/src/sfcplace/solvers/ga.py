"""Generational GA with elitism, shared by the GAP-GABA and GAP-RABA encodings."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..evaluator import EvaluationReport
from ..model import Infrastructure, ObjectiveConfig, Solution, Workload
from .gaba import GabaEncoding
from .operators import swap_mutation, tournament_select, two_point_crossover
from .problem import Problem
from .raba import RabaEncoding


@dataclass(frozen=True)
class GaConfig:
    generations: int = 2000
    population: int = 400
    crossovers_per_generation: int = 380
    elites: int = 100
    mutation_rate: float = 0.10
    tournament_size: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.population < 1:
            raise ValueError("population must be >= 1")
        if not 1 <= self.elites <= self.population:
            raise ValueError("elites must lie in [1, population]")
        if self.crossovers_per_generation < 0:
            raise ValueError("crossovers_per_generation must be >= 0")
        if not 0 <= self.mutation_rate <= 1:
            raise ValueError("mutation_rate must lie in [0, 1]")
        if self.tournament_size < 2:
            raise ValueError("tournament_size must be >= 2")

    @classmethod
    def scaled(cls, population: int, **kw) -> "GaConfig":
        """Keep the published elite/offspring proportions at a different population size."""
        return cls(population=population,
                   crossovers_per_generation=max(2, round(population * 0.95)),
                   elites=max(1, round(population * 0.25)), **kw)


@dataclass
class SolveResult:
    algorithm: str
    best_solution: Solution
    best_report: EvaluationReport
    fitness_history: list[float]
    wall_time: float
    seed: int
    evaluations: int = 0
    optimal: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.best_report.feasible


ENCODINGS = {"gap-gaba": GabaEncoding, "gap-raba": RabaEncoding}


def run_ga(encoding: str, infra: Infrastructure, workload: Workload, obj_cfg: ObjectiveConfig,
           ga_cfg: GaConfig, threads: int = 1, problem: Problem | None = None) -> SolveResult:
    """Evolve a population for ``ga_cfg.generations`` rounds and return the incumbent.

    Each round keeps the elites, breeds ``crossovers_per_generation`` children by
    tournament selection, two-point crossover and swap mutation, and truncates the
    pooled elites + children back to the population size (topping up from the
    previous population if the pool is too small). Ties in fitness keep pool order.
    """
    start = time.perf_counter()
    problem = problem or Problem(infra, workload, obj_cfg)
    if encoding == "gap-raba":
        enc = RabaEncoding(problem, threads=threads)
    elif encoding == "gap-gaba":
        enc = GabaEncoding(problem)
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    cfg = ga_cfg
    rng = np.random.default_rng(cfg.seed)

    pop = enc.random_population(rng, cfg.population)
    tokens = list(enc.tokens(cfg.seed, 0, cfg.population))
    fit = _fitness(enc, pop, tokens, threads)
    evaluations = len(pop)
    history = [float(fit.min())]

    for gen in range(1, cfg.generations + 1):
        order = np.argsort(fit, kind="stable")
        elite_idx = order[:cfg.elites]

        children = []
        while len(children) < cfg.crossovers_per_generation:
            a = tournament_select(pop, fit, cfg.tournament_size, rng)
            b = tournament_select(pop, fit, cfg.tournament_size, rng)
            for child in two_point_crossover(pop[a], pop[b], rng):
                children.append(swap_mutation(child, cfg.mutation_rate, rng))
        children = children[:cfg.crossovers_per_generation]

        if children:
            child_genes = np.array(children)
            child_tokens = list(enc.tokens(cfg.seed, gen, len(children)))
            child_fit = _fitness(enc, child_genes, child_tokens, threads)
            evaluations += len(children)
        else:
            child_genes = np.empty((0, pop.shape[1]), dtype=pop.dtype)
            child_tokens, child_fit = [], np.empty(0)

        pool_genes = np.concatenate([pop[elite_idx], child_genes])
        pool_tokens = [tokens[i] for i in elite_idx] + child_tokens
        pool_fit = np.concatenate([fit[elite_idx], child_fit])
        if len(pool_fit) < cfg.population:
            rest = order[cfg.elites:cfg.elites + cfg.population - len(pool_fit)]
            pool_genes = np.concatenate([pool_genes, pop[rest]])
            pool_tokens += [tokens[i] for i in rest]
            pool_fit = np.concatenate([pool_fit, fit[rest]])

        keep = np.argsort(pool_fit, kind="stable")[:cfg.population]
        pop, fit = pool_genes[keep], pool_fit[keep]
        tokens = [pool_tokens[i] for i in keep]
        history.append(float(fit[0]))

    best = int(np.argmin(fit))
    solution = enc.decode(pop[best], tokens[best])
    report = problem.evaluate(solution)
    return SolveResult(
        algorithm=encoding,
        best_solution=solution,
        best_report=report,
        fitness_history=history,
        wall_time=time.perf_counter() - start,
        seed=cfg.seed,
        evaluations=evaluations,
        extra={"chromosome": [int(g) for g in pop[best]]},
    )


def _fitness(enc, genes, tokens, threads: int) -> np.ndarray:
    if isinstance(enc, GabaEncoding) and threads > 1 and len(genes) > 1:
        from concurrent.futures import ThreadPoolExecutor

        ties = np.asarray(tokens)
        chunks = np.array_split(np.arange(len(genes)), threads)
        with ThreadPoolExecutor(threads) as pool:
            parts = pool.map(lambda idx: enc.fitness(genes[idx], ties[idx]), [c for c in chunks if len(c)])
            return np.concatenate(list(parts))
    if isinstance(enc, GabaEncoding):
        return enc.fitness(genes, np.asarray(tokens))
    return enc.fitness(genes, tokens)
