"""Random feasible-solution baseline."""

from __future__ import annotations

import random
import time

import numpy as np

from ..model import Infrastructure, ObjectiveConfig, Workload
from .ga import SolveResult
from .problem import Problem
from .raba import raba_decode_and_backup


def random_baseline(infra: Infrastructure, workload: Workload, obj_cfg: ObjectiveConfig, attempts: int = 10_000,
                    seed: int = 0, problem: Problem | None = None) -> SolveResult:
    """Rejection-sample uniform random placements with random backups.

    Returns the first draw without penalties, or the least-penalized draw (ties by
    fitness) once ``attempts`` are exhausted.
    """
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    start = time.perf_counter()
    problem = problem or Problem(infra, workload, obj_cfg)
    rng = np.random.default_rng(seed)
    best = None
    history = []
    for attempt in range(1, attempts + 1):
        genes = rng.integers(0, problem.num_categories, size=problem.num_vnfs)
        sub = random.Random(int(rng.integers(0, 2**63)))
        solution, _ = raba_decode_and_backup(problem, genes, sub)
        report = problem.evaluate(solution)
        if best is None or (report.penalty_count, report.fitness) < (best[1].penalty_count, best[1].fitness):
            best = (solution, report)
        history.append(best[1].fitness)
        if report.penalty_count == 0:
            break
    return SolveResult(
        algorithm="random",
        best_solution=best[0],
        best_report=best[1],
        fitness_history=history,
        wall_time=time.perf_counter() - start,
        seed=seed,
        evaluations=attempt,
        extra={"attempts": attempt},
    )
