"""Precomputed instance data shared by the solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..evaluator import EvaluationReport, NormalizationBounds, evaluate, normalization_bounds
from ..model import Infrastructure, ObjectiveConfig, Solution, Workload
from ..reliability import group_reliability


class KernelTable:
    """Lazily filled dense table of group reliabilities indexed by (strategy, category, primaries, backups)."""

    def __init__(self, infra: Infrastructure, max_primaries: int, holding_time: float):
        self.infra = infra
        self.t = holding_time
        max_backups = infra.total_nodes
        self.values = np.full((5, infra.num_categories, max_primaries + 1, max_backups + 1), np.nan)

    def lookup(self, strategy, category, primaries, backups) -> np.ndarray:
        """Vectorised lookup; all index arrays must broadcast together and hold valid entries."""
        idx = np.broadcast_arrays(strategy, category, primaries, backups)
        out = self.values[idx]
        todo = np.isnan(out)
        if todo.any():
            for s, i, n, b in set(zip(*(a[todo].tolist() for a in idx))):
                cat = self.infra.categories[i]
                self.values[s, i, n, b] = group_reliability(s, n, b, cat.fail_active, cat.fail_standby, self.t)
            out = self.values[idx]
        return out


@dataclass
class Problem:
    infra: Infrastructure
    workload: Workload
    cfg: ObjectiveConfig
    bounds: NormalizationBounds = None
    kernels: KernelTable = field(init=False, repr=False)

    def __post_init__(self):
        if self.bounds is None:
            self.bounds = normalization_bounds(self.infra, self.workload, self.cfg)
        w = self.workload
        self.num_vnfs = w.total_vnfs
        self.num_categories = self.infra.num_categories
        self.offsets = np.array(w.offsets())
        self.vnf_sfc = np.repeat(np.arange(len(w)), [s.length for s in w])
        self.loads = np.array([x for s in w for x in s.loads])
        self.strategy = np.array([int(s.strategy) for s in w])
        self.vnf_strategy = self.strategy[self.vnf_sfc]
        self.dedicated = np.array([s.strategy.dedicated for s in w])
        self.targets = np.array([s.reliability_target for s in w])
        self.deadlines = np.array([s.deadline for s in w])
        cats = self.infra.categories
        self.capacity = np.array([c.node_count for c in cats])
        self.clock = np.array([c.clock for c in cats])
        self.cost_active = np.array([c.cost_active for c in cats])
        self.cost_standby = np.array([c.cost_standby for c in cats])
        self.node_category = self.infra.node_categories()
        self.kernels = KernelTable(self.infra, max(s.length for s in w), self.cfg.holding_time)
        self._group_cache: dict[tuple[int, int, int, int], float] = {}

    def group(self, strategy: int, category: int, primaries: int, backups: int) -> float:
        """Scalar group reliability with a per-instance cache (hot path of the RABA decoder)."""
        key = (strategy, category, primaries, backups)
        try:
            return self._group_cache[key]
        except KeyError:
            cat = self.infra.categories[category]
            value = group_reliability(strategy, primaries, backups, cat.fail_active, cat.fail_standby,
                                      self.cfg.holding_time)
            self._group_cache[key] = value
            return value

    def evaluate(self, solution: Solution) -> EvaluationReport:
        return evaluate(solution, self.infra, self.workload, self.cfg, self.bounds)
