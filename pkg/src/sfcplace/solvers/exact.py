"""Exhaustive search over placements and backup counts, for oracle-sized instances."""

from __future__ import annotations

import itertools
import math
import time

from ..model import Infrastructure, ObjectiveConfig, Solution, Workload
from .ga import SolveResult
from .problem import Problem

DEFAULT_CAP = 10_000_000


class SearchSpaceTooLarge(RuntimeError):
    def __init__(self, size: int, cap: int, what: str = "evaluations"):
        super().__init__(f"exhaustive search needs {size} {what}, cap is {cap}")
        self.size = size
        self.cap = cap


def _slots(problem: Problem, placement: tuple[int, ...]):
    """Backup slots per category: (sfc, vnf) for dedicated SFCs, (sfc, None) for shared pools."""
    w = problem.workload
    slots = [[] for _ in range(problem.num_categories)]
    v = 0
    for k, sfc in enumerate(w):
        row = placement[v:v + sfc.length]
        v += sfc.length
        if sfc.strategy.dedicated:
            for j, i in enumerate(row):
                if i is not None:
                    slots[i].append((k, j))
        else:
            for i in sorted(set(row) - {None}):
                slots[i].append((k, None))
    return slots


def _placements(problem: Problem):
    """Every category per VNF, plus leaving it unplaced (the GABA decoder can produce that too)."""
    options = list(range(problem.num_categories)) + [None]
    return itertools.product(options, repeat=problem.num_vnfs)


def _free(problem: Problem, placement) -> list[int]:
    free = list(problem.capacity)
    for i in placement:
        if i is not None:
            free[i] -= 1
    return free


def search_space_size(problem: Problem) -> int:
    """Number of (placement, backup vector) candidates with all categories within capacity."""
    total = 0
    for placement in _placements(problem):
        free = _free(problem, placement)
        if min(free) < 0:
            continue
        count = 1
        for f, s in zip(free, _slots(problem, placement)):
            count *= math.comb(f + len(s), len(s))  # ways to put <= f backups into len(s) slots
        total += count
    return total


def _compositions(limit: int, parts: int):
    """All non-negative integer vectors of length ``parts`` with sum <= limit, lexicographic."""
    if parts == 0:
        yield ()
        return
    for first in range(limit + 1):
        for rest in _compositions(limit - first, parts - 1):
            yield (first,) + rest


def exhaustive_solve(infra: Infrastructure, workload: Workload, obj_cfg: ObjectiveConfig,
                     cap: int = DEFAULT_CAP, problem: Problem | None = None) -> SolveResult:
    """Global fitness minimizer; ties go to the lexicographically smallest encoding.

    The encoding compared on ties is (flattened assignment, flattened dedicated
    backups, flattened shared backups), with "unplaced" sorting after every category.
    """
    start = time.perf_counter()
    problem = problem or Problem(infra, workload, obj_cfg)
    placements = (problem.num_categories + 1) ** problem.num_vnfs
    if placements > cap:
        raise SearchSpaceTooLarge(placements, cap, what="placements to enumerate")
    size = search_space_size(problem)
    if size > cap:
        raise SearchSpaceTooLarge(size, cap)

    w = problem.workload
    m = problem.num_categories
    best = None
    evaluations = 0
    for placement in _placements(problem):
        free = _free(problem, placement)
        if min(free) < 0:
            continue
        assignment, v = [], 0
        for sfc in w:
            assignment.append(list(placement[v:v + sfc.length]))
            v += sfc.length
        slots = _slots(problem, placement)
        per_cat = [list(_compositions(f, len(s))) for f, s in zip(free, slots)]
        for combo in itertools.product(*per_cat):
            dedicated = [[0] * s.length for s in w]
            shared = [[0] * m for _ in w]
            for i, counts in enumerate(combo):
                for (k, j), b in zip(slots[i], counts):
                    if j is None:
                        shared[k][i] = b
                    else:
                        dedicated[k][j] = b
            solution = Solution(assignment, dedicated, shared)
            report = problem.evaluate(solution)
            evaluations += 1
            key = (report.fitness, tuple(m if c is None else c for c in placement), _flat(dedicated), _flat(shared))
            if best is None or key < best[0]:
                best = (key, solution, report)

    if best is None:
        raise RuntimeError("no placement fits within category capacities")
    return SolveResult(
        algorithm="exact",
        best_solution=best[1],
        best_report=best[2],
        fitness_history=[best[2].fitness],
        wall_time=time.perf_counter() - start,
        seed=0,
        evaluations=evaluations,
        optimal=True,
        extra={"search_space": size},
    )


def _flat(rows) -> tuple[int, ...]:
    return tuple(x for r in rows for x in r)
