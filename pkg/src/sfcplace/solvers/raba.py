"""GA placement with randomized backup allocation (VNF-indexed chromosome).

Genes hold the 0-based category of each global VNF; backups are then handed out
at random, one node at a time, until each SFC meets its reliability target.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..evaluator import CONSTRAINT_TOL
from ..model import Infrastructure, ObjectiveConfig, Solution, Workload
from .problem import Problem


def raba_decode_and_backup(problem: Problem, genes, rng: random.Random) -> tuple[Solution, int]:
    """Place VNFs as the genes say, then assign backups SFC by SFC in random priority order.

    For each SFC one backup at a time goes to a uniformly chosen category that hosts
    one of its VNFs and still has an idle node (for dedicated strategies, to a
    uniformly chosen VNF of the SFC in that category), until the SFC meets its
    target or no such node is left.

    Returns the solution and its penalty count from this stage: one per SFC left
    below target, plus one per node by which primaries alone overflow a category.
    """
    w = problem.workload
    m = problem.num_categories
    group = problem.group
    prod = math.prod
    cache = problem._group_cache  # inline hit path; misses go through group()
    genes = [int(g) for g in genes]

    assignment, start = [], 0
    for s in w.sfcs:
        assignment.append(genes[start:start + s.length])
        start += s.length
    free = problem.capacity.tolist()
    for g in genes:
        free[g] -= 1
    overflow = sum(-f for f in free if f < 0)
    free = [max(0, f) for f in free]

    dedicated = [[0] * s.length for s in w.sfcs]
    shared = [[0] * m for _ in w.sfcs]
    priority = list(range(len(w)))
    rng.shuffle(priority)
    uniform = rng.random
    strategies = problem.strategy.tolist()
    targets = problem.targets.tolist()
    is_dedicated = problem.dedicated.tolist()
    penalty = overflow
    for k in priority:
        strat = strategies[k]
        row = assignment[k]
        hosts = sorted(set(row))
        target = targets[k] - CONSTRAINT_TOL
        dedicated_k = is_dedicated[k]
        if dedicated_k:
            members = {i: [j for j, c in enumerate(row) if c == i] for i in hosts}
            counts = dedicated[k]
            factors = [group(strat, c, 1, 0) for c in row]
        else:
            hosted = [row.count(i) for i in range(m)]
            counts = shared[k]
            factors = [group(strat, i, hosted[i], 0) if hosted[i] else 1.0 for i in range(m)]
        omega = prod(factors)
        eligible = [i for i in hosts if free[i] > 0]
        while omega < target and eligible:
            i = eligible[int(uniform() * len(eligible))]
            free[i] -= 1
            if not free[i]:
                eligible.remove(i)
            if dedicated_k:
                choices = members[i]
                j = choices[int(uniform() * len(choices))]
                counts[j] += 1
                factors[j] = cache.get((strat, i, 1, counts[j])) or group(strat, i, 1, counts[j])
            else:
                counts[i] += 1
                factors[i] = cache.get((strat, i, hosted[i], counts[i])) or group(strat, i, hosted[i], counts[i])
            omega = prod(factors)
        if omega < target:
            penalty += 1
    return Solution(assignment, dedicated, shared), penalty


def subseed(seed: int, generation: int, slot: int) -> int:
    """Independent per-candidate seed; identical whichever worker evaluates the slot."""
    return int(np.random.SeedSequence([seed, generation, slot]).generate_state(1, dtype=np.uint64)[0])


class RabaEncoding:
    name = "gap-raba"

    def __init__(self, problem: Problem, threads: int = 1):
        self.problem = problem
        self.length = problem.num_vnfs
        self.low, self.high = 0, problem.num_categories - 1
        self.threads = max(1, threads)

    def random_population(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.integers(self.low, self.high + 1, size=(size, self.length))

    def tokens(self, seed: int, generation: int, count: int) -> list[int]:
        return [subseed(seed, generation, slot) for slot in range(count)]

    def decode(self, genes, token) -> Solution:
        return raba_decode_and_backup(self.problem, genes, random.Random(token))[0]

    def _one(self, genes, token) -> float:
        return self.problem.evaluate(self.decode(genes, token)).fitness

    def fitness(self, genes: np.ndarray, tokens) -> np.ndarray:
        if self.threads > 1:
            with ThreadPoolExecutor(self.threads) as pool:
                return np.array(list(pool.map(self._one, genes, tokens)))
        return np.array([self._one(g, tok) for g, tok in zip(genes, tokens)])


def raba_fitness(chromosome, infra: Infrastructure, workload: Workload, cfg: ObjectiveConfig, seed: int = 0,
                 bounds=None) -> float:
    problem = Problem(infra, workload, cfg, bounds)
    return RabaEncoding(problem)._one(chromosome, seed)
