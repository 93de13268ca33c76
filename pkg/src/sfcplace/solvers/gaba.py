"""GA placement with GA-driven backup allocation (node-indexed chromosome).

A chromosome has one gene per physical node, grouped by category. Gene 0 leaves
the node idle; gene v > 0 dedicates the node to global VNF v (1-based), either as
its primary or as one of its backups.
"""

from __future__ import annotations

import random

import numpy as np

from ..evaluator import CONSTRAINT_TOL, combine
from ..model import Infrastructure, ObjectiveConfig, Solution, Strategy, Workload
from .problem import Problem
from .raba import raba_decode_and_backup


def _choose_category(present: list[int], u: float | None) -> int:
    # u in [0, 1) picks uniformly among candidate categories; None pins the lowest index
    if u is None or len(present) == 1:
        return present[0]
    return present[int(u * len(present))]


def decode(problem: Problem, genes, tie_breaks=None) -> tuple[Solution, list[int]]:
    """Turn a chromosome into a Solution and the list of missing (0-based) global VNF indices."""
    w = problem.workload
    m = problem.num_categories
    v_total = problem.num_vnfs
    counts = np.zeros((m, v_total + 1), dtype=np.int64)
    np.add.at(counts, (problem.node_category, np.asarray(genes)), 1)
    counts = counts[:, 1:]

    assignment = [[None] * s.length for s in w]
    dedicated = [[0] * s.length for s in w]
    shared = [[0] * m for _ in w]
    missing = []
    for v, (k, j) in enumerate(w.vnf_index()):
        present = [i for i in range(m) if counts[i, v]]
        if not present:
            missing.append(v)
            continue
        i = _choose_category(present, None if tie_breaks is None else float(tie_breaks[v]))
        assignment[k][j] = i
        extra = int(counts[i, v]) - 1
        if w.sfcs[k].strategy.dedicated:
            dedicated[k][j] = extra
        else:
            shared[k][i] += extra
    return Solution(assignment, dedicated, shared), missing


def encode(problem: Problem, solution: Solution, rng: np.random.Generator) -> np.ndarray:
    """Chromosome realising ``solution``, with copies scattered over random nodes of each category.

    Shared-pool backups are written as extra copies of a random VNF of the SFC in that
    category. A category that cannot hold everything keeps primaries first, then backups;
    whatever does not fit is dropped.
    """
    m = problem.num_categories
    primaries = [[] for _ in range(m)]
    backups = [[] for _ in range(m)]
    for k, sfc in enumerate(problem.workload):
        base = int(problem.offsets[k]) + 1
        for j, c in enumerate(solution.assignment[k]):
            if c is not None:
                primaries[c].append(base + j)
                backups[c].extend([base + j] * solution.dedicated_backups[k][j])
        for i, b in enumerate(solution.shared_backups[k]):
            members = [base + j for j, c in enumerate(solution.assignment[k]) if c == i]
            if members:
                backups[i].extend(members[rng.integers(len(members))] for _ in range(b))
    out = []
    for i in range(m):
        size = int(problem.capacity[i])
        genes = (primaries[i] + backups[i])[:size]
        out.extend(rng.permutation(np.array(genes + [0] * (size - len(genes)), dtype=np.int64)))
    return np.array(out, dtype=np.int64)


def gaba_decode(chromosome, infra: Infrastructure, workload: Workload, rng: np.random.Generator | None = None,
                cfg: ObjectiveConfig | None = None):
    """Decode with random cross-category resolution drawn from ``rng`` (lowest index when rng is None)."""
    problem = Problem(infra, workload, cfg or ObjectiveConfig())
    ties = None if rng is None else rng.random(workload.total_vnfs)
    return decode(problem, chromosome, ties)


def gaba_fitness(chromosome, infra: Infrastructure, workload: Workload, cfg: ObjectiveConfig, bounds=None,
                 rng: np.random.Generator | None = None) -> float:
    problem = Problem(infra, workload, cfg, bounds)
    ties = None if rng is None else rng.random(workload.total_vnfs)
    solution, _ = decode(problem, chromosome, ties)
    report = problem.evaluate(solution)
    assert all(u <= c for u, c in zip(report.per_category_usage, problem.capacity))
    return report.fitness


class GabaEncoding:
    name = "gap-gaba"

    def __init__(self, problem: Problem):
        self.problem = problem
        self.length = problem.infra.total_nodes
        self.low, self.high = 0, problem.num_vnfs

    def random_population(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Chromosomes encoding random placements with randomly grown backup sets.

        Uniform genes almost never give an SFC enough copies to meet its target, so
        the search would stall on reliability penalties.
        """
        out = np.empty((size, self.length), dtype=np.int64)
        for p in range(size):
            genes = rng.integers(0, self.problem.num_categories, size=self.problem.num_vnfs)
            solution, _ = raba_decode_and_backup(self.problem, genes, random.Random(int(rng.integers(2**63))))
            out[p] = encode(self.problem, solution, rng)
        return out

    def tokens(self, seed: int, generation: int, count: int) -> np.ndarray:
        """Tie-break uniforms, one row per slot, from a stream keyed on (seed, generation)."""
        return np.random.default_rng([seed, generation]).random((count, self.problem.num_vnfs))

    def decode(self, genes, token) -> Solution:
        return decode(self.problem, genes, token)[0]

    def fitness(self, genes: np.ndarray, ties: np.ndarray) -> np.ndarray:
        """Fitness of every row of ``genes``; mirrors ``decode`` + ``evaluate`` arithmetic."""
        pb = self.problem
        genes = np.asarray(genes)
        pop, m, v = genes.shape[0], pb.num_categories, pb.num_vnfs
        flat = (np.arange(pop)[:, None] * m + pb.node_category[None, :]) * (v + 1) + genes
        counts = np.bincount(flat.ravel(), minlength=pop * m * (v + 1)).reshape(pop, m, v + 1)[:, :, 1:]

        present = counts > 0
        ncat = present.sum(axis=1)
        placed = ncat > 0
        pick = np.minimum((ties * ncat).astype(np.int64), np.maximum(ncat - 1, 0))
        pick = np.where(ncat == 1, 0, pick)
        chosen = np.argmax(present.cumsum(axis=1) > pick[:, None, :], axis=1)
        extra = np.where(placed, np.take_along_axis(counts, chosen[:, None, :], axis=1)[:, 0, :] - 1, 0)

        offsets = pb.offsets
        vnf_delay = np.where(placed, pb.loads / pb.clock[chosen], 0.0)
        delay = _sequential_groups(vnf_delay, offsets)

        # dedicated strategies: one group per VNF
        strat_v = np.broadcast_to(pb.vnf_strategy, chosen.shape)
        ded_mask = pb.dedicated[pb.vnf_sfc]
        ded_rel = np.where(placed, pb.kernels.lookup(strat_v, chosen, 1, np.where(ded_mask, extra, 0)), 1.0)
        pa, ps = pb.cost_active[chosen], pb.cost_standby[chosen]
        ded_cost = np.where(strat_v == Strategy.DEDICATED_ACTIVE, (extra + 1) * pa, pa + extra * ps)
        ded_cost = np.where(placed, ded_cost, 0.0)

        # shared strategies: one group per (SFC, category)
        onehot = (chosen[:, :, None] == np.arange(m)) & placed[:, :, None]
        hosted = np.add.reduceat(onehot.astype(np.int64), offsets, axis=1)               # (pop, K, M)
        pool = np.add.reduceat(onehot * extra[:, :, None], offsets, axis=1)
        strat_k = np.broadcast_to(pb.strategy[None, :, None], hosted.shape)
        cat_idx = np.broadcast_to(np.arange(m), hosted.shape)
        pool = np.where(pb.dedicated[None, :, None], 0, pool)
        shr_rel = np.where(hosted > 0, pb.kernels.lookup(strat_k, cat_idx, np.maximum(hosted, 1), pool), 1.0)
        shr_cost = np.where(strat_k == Strategy.SHARED_ACTIVE,
                            (hosted + pool) * pb.cost_active, hosted * pb.cost_active + pool * pb.cost_standby)
        shr_cost = np.where(hosted > 0, shr_cost, 0.0)

        reliability = np.where(pb.dedicated, np.multiply.reduceat(ded_rel, offsets, axis=1),
                               _sequential(shr_rel, np.multiply, 1.0))
        cost = np.where(pb.dedicated, _sequential_groups(ded_cost, offsets), _sequential(shr_cost, np.add, 0.0))

        penalty = ((~placed).sum(axis=1)
                   + (reliability < pb.targets - CONSTRAINT_TOL).sum(axis=1)
                   + (delay > pb.deadlines + CONSTRAINT_TOL).sum(axis=1))
        total_cost = _sequential(cost, np.add, 0.0)
        total_delay = _sequential(delay, np.add, 0.0)
        return combine(total_cost, total_delay, penalty, pb.cfg, pb.bounds)[3]


def _sequential(a: np.ndarray, op, start: float) -> np.ndarray:
    """Left fold over the last axis, matching Python's scalar accumulation order."""
    acc = np.full(a.shape[:-1], start)
    for x in np.moveaxis(a, -1, 0):
        acc = op(acc, x)
    return acc


def _sequential_groups(a: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    bounds = list(offsets) + [a.shape[1]]
    return np.stack([_sequential(a[:, lo:hi], np.add, 0.0) for lo, hi in zip(bounds[:-1], bounds[1:])], axis=1)
