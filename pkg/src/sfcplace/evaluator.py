"""Constraint checks, normalization and fitness for candidate placements."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .model import Infrastructure, ObjectiveConfig, Solution, Workload
from .reliability import sfc_cost, sfc_reliability

# absorbs float noise at constraint boundaries
CONSTRAINT_TOL = 1e-12


class InfeasibleInstanceError(ValueError):
    """The workload cannot fit even without backups."""


@dataclass(frozen=True)
class NormalizationBounds:
    tau_min: float
    tau_max: float
    p_min: float
    p_max: float

    def __post_init__(self):
        if not (0 <= self.tau_min <= self.tau_max and 0 <= self.p_min <= self.p_max):
            raise ValueError(f"inconsistent bounds {self}")


@dataclass(frozen=True)
class SfcMetrics:
    reliability: float
    delay: float
    cost: float
    reliability_ok: bool
    deadline_ok: bool


@dataclass(frozen=True)
class EvaluationReport:
    per_sfc: tuple[SfcMetrics, ...]
    per_category_usage: tuple[int, ...]
    capacity_ok: bool
    placement_complete: bool
    missing_vnfs: int
    capacity_overflow: int
    penalty_count: int
    total_cost: float
    total_delay: float
    normalized_cost: float
    normalized_delay: float
    objective: float
    fitness: float

    @property
    def feasible(self) -> bool:
        return self.penalty_count == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_sfc"] = [asdict(m) for m in self.per_sfc]
        d["per_category_usage"] = list(self.per_category_usage)
        d["feasible"] = self.feasible
        return d


def sfc_delay(solution: Solution, k: int, infra: Infrastructure, workload: Workload) -> float:
    """Execution time of SFC k: sum of load / clock over its placed VNFs."""
    cats = infra.categories
    return sum(load / cats[c].clock
               for load, c in zip(workload.sfcs[k].loads, solution.assignment[k]) if c is not None)


def capacity_usage(solution: Solution, infra: Infrastructure, workload: Workload) -> tuple[list[int], bool]:
    m = infra.num_categories
    usage = [0] * m
    for k, sfc in enumerate(workload):
        hosted = solution.hosted_counts(k, m)
        for i in range(m):
            usage[i] += hosted[i]
        if sfc.strategy.dedicated:
            for c, b in zip(solution.assignment[k], solution.dedicated_backups[k]):
                if c is not None:
                    usage[c] += b
        else:
            for i in range(m):
                if hosted[i]:
                    usage[i] += solution.shared_backups[k][i]
    ok = all(u <= c.node_count for u, c in zip(usage, infra.categories))
    return usage, ok


def normalization_bounds(infra: Infrastructure, workload: Workload, cfg: ObjectiveConfig | None = None) -> NormalizationBounds:
    """Analytic delay and cost bounds valid for every capacity-feasible placement.

    Delay is bracketed by running everything on the fastest or slowest clock.
    The cheapest possible deployment puts every primary on the cheapest active
    node with no backups; no deployment can cost more than activating every node.
    """
    if workload.total_vnfs > infra.total_nodes:
        raise InfeasibleInstanceError(
            f"{workload.total_vnfs} VNFs cannot fit on {infra.total_nodes} nodes")
    total_load = sum(sum(s.loads) for s in workload)
    clocks = [c.clock for c in infra.categories]
    cheapest = min(c.cost_active for c in infra.categories)
    return NormalizationBounds(
        tau_min=total_load / max(clocks),
        tau_max=total_load / min(clocks),
        p_min=workload.total_vnfs * cheapest,
        p_max=sum(c.node_count * c.cost_active for c in infra.categories),
    )


def _normalize(value, lo: float, hi: float):
    # unplaced VNFs can push totals below the analytic minimum; clip so penalties stay dominant
    if hi <= 0:
        return 0.0
    out = (value - lo) / hi
    return np.maximum(out, 0.0) if isinstance(out, np.ndarray) else max(out, 0.0)


def combine(total_cost: float, total_delay: float, penalty: int, cfg: ObjectiveConfig,
            bounds: NormalizationBounds) -> tuple[float, float, float, float]:
    """Return (normalized_cost, normalized_delay, objective, fitness)."""
    ncost = _normalize(total_cost, bounds.p_min, bounds.p_max)
    ndelay = _normalize(total_delay, bounds.tau_min, bounds.tau_max)
    objective = cfg.alpha * ncost + cfg.beta * ndelay
    if cfg.raw_fitness:
        fitness = cfg.alpha * total_cost + cfg.beta * total_delay + cfg.penalty_weight * penalty
    else:
        fitness = objective + cfg.penalty_weight * penalty
    return ncost, ndelay, objective, fitness


def evaluate(solution: Solution, infra: Infrastructure, workload: Workload, cfg: ObjectiveConfig,
             bounds: NormalizationBounds) -> EvaluationReport:
    """Score a candidate. Violations become penalties, never exceptions.

    One penalty unit is charged per unplaced VNF, per SFC below its reliability
    target, per SFC over its deadline and per node used beyond a category's size.
    """
    per_sfc = []
    missing = 0
    for k, sfc in enumerate(workload):
        missing += sum(1 for c in solution.assignment[k] if c is None)
        omega = sfc_reliability(solution, k, infra, workload, cfg)
        delay = sfc_delay(solution, k, infra, workload)
        per_sfc.append(SfcMetrics(
            reliability=omega,
            delay=delay,
            cost=sfc_cost(solution, k, infra, workload),
            reliability_ok=omega >= sfc.reliability_target - CONSTRAINT_TOL,
            deadline_ok=delay <= sfc.deadline + CONSTRAINT_TOL,
        ))
    usage, capacity_ok = capacity_usage(solution, infra, workload)
    overflow = sum(max(0, u - c.node_count) for u, c in zip(usage, infra.categories))
    penalty = (missing + overflow
               + sum(not m.reliability_ok for m in per_sfc)
               + sum(not m.deadline_ok for m in per_sfc))
    total_cost = sum(m.cost for m in per_sfc)
    total_delay = sum(m.delay for m in per_sfc)
    ncost, ndelay, objective, fitness = combine(total_cost, total_delay, penalty, cfg, bounds)
    return EvaluationReport(
        per_sfc=tuple(per_sfc),
        per_category_usage=tuple(usage),
        capacity_ok=capacity_ok,
        placement_complete=missing == 0,
        missing_vnfs=missing,
        capacity_overflow=overflow,
        penalty_count=penalty,
        total_cost=total_cost,
        total_delay=total_delay,
        normalized_cost=ncost,
        normalized_delay=ndelay,
        objective=objective,
        fitness=fitness,
    )
