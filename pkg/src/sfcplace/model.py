"""Domain types for fog infrastructure and SFC workloads, plus dataset I/O and generation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import IO, Iterator

import numpy as np


class DatasetError(ValueError):
    """Raised when a dataset document is malformed or violates a model invariant."""


class Strategy(IntEnum):
    DEDICATED_ACTIVE = 1
    DEDICATED_STANDBY = 2
    SHARED_ACTIVE = 3
    SHARED_STANDBY = 4

    @property
    def dedicated(self) -> bool:
        return self in (Strategy.DEDICATED_ACTIVE, Strategy.DEDICATED_STANDBY)

    @property
    def shared(self) -> bool:
        return not self.dedicated

    @property
    def standby(self) -> bool:
        return self in (Strategy.DEDICATED_STANDBY, Strategy.SHARED_STANDBY)


@dataclass(frozen=True)
class NodeCategory:
    node_count: int
    clock: float
    cost_active: float
    cost_standby: float
    fail_active: float
    fail_standby: float

    def __post_init__(self):
        if self.node_count < 1:
            raise DatasetError(f"node_count must be >= 1, got {self.node_count}")
        if not self.clock > 0:
            raise DatasetError(f"clock must be > 0, got {self.clock}")
        for name in ("cost_active", "cost_standby", "fail_active", "fail_standby"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise DatasetError(f"{name} must be finite and >= 0, got {value}")
        if self.fail_standby > self.fail_active:
            raise DatasetError("fail_standby must not exceed fail_active")
        if self.cost_standby > self.cost_active:
            raise DatasetError("cost_standby must not exceed cost_active")


@dataclass(frozen=True)
class Infrastructure:
    categories: tuple[NodeCategory, ...]

    def __post_init__(self):
        object.__setattr__(self, "categories", tuple(self.categories))
        if not self.categories:
            raise DatasetError("infrastructure needs at least one category")

    @property
    def num_categories(self) -> int:
        return len(self.categories)

    @property
    def total_nodes(self) -> int:
        return sum(c.node_count for c in self.categories)

    def node_categories(self) -> np.ndarray:
        """Category index of every physical node, grouped by category in order."""
        return np.repeat(np.arange(self.num_categories), [c.node_count for c in self.categories])


@dataclass(frozen=True)
class SfcRequest:
    loads: tuple[float, ...]
    deadline: float
    reliability_target: float
    strategy: Strategy

    def __post_init__(self):
        object.__setattr__(self, "loads", tuple(float(x) for x in self.loads))
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if not self.loads:
            raise DatasetError("an SFC needs at least one VNF")
        if any(not (math.isfinite(x) and x > 0) for x in self.loads):
            raise DatasetError("all loads must be > 0")
        if not (math.isfinite(self.deadline) and self.deadline > 0):
            raise DatasetError(f"deadline must be > 0, got {self.deadline}")
        if not 0 < self.reliability_target < 1:
            raise DatasetError(f"reliability_target must lie in (0, 1), got {self.reliability_target}")

    @property
    def length(self) -> int:
        return len(self.loads)


@dataclass(frozen=True)
class Workload:
    sfcs: tuple[SfcRequest, ...]

    def __post_init__(self):
        object.__setattr__(self, "sfcs", tuple(self.sfcs))
        if not self.sfcs:
            raise DatasetError("workload needs at least one SFC")

    def __len__(self) -> int:
        return len(self.sfcs)

    def __iter__(self) -> Iterator[SfcRequest]:
        return iter(self.sfcs)

    @property
    def total_vnfs(self) -> int:
        return sum(s.length for s in self.sfcs)

    def offsets(self) -> list[int]:
        """Global index of the first VNF of each SFC (0-based)."""
        out, acc = [], 0
        for s in self.sfcs:
            out.append(acc)
            acc += s.length
        return out

    def vnf_index(self) -> list[tuple[int, int]]:
        """Global VNF index -> (sfc, position) pairs, in workload order."""
        return [(k, j) for k, s in enumerate(self.sfcs) for j in range(s.length)]

    def with_strategy(self, strategy: int) -> "Workload":
        return Workload(tuple(
            SfcRequest(s.loads, s.deadline, s.reliability_target, Strategy(strategy)) for s in self.sfcs
        ))


@dataclass(frozen=True)
class ObjectiveConfig:
    alpha: float = 0.65
    beta: float = 0.35
    penalty_weight: float = 1000.0
    holding_time: float = 1.0
    raw_fitness: bool = False

    def __post_init__(self):
        if not (0 <= self.alpha <= 1 and 0 <= self.beta <= 1):
            raise DatasetError("alpha and beta must lie in [0, 1]")
        if abs(self.alpha + self.beta - 1) > 1e-9:
            raise DatasetError(f"alpha + beta must equal 1, got {self.alpha + self.beta}")
        if not self.penalty_weight > 0:
            raise DatasetError("penalty_weight must be > 0")
        if not self.holding_time > 0:
            raise DatasetError("holding_time must be > 0")


@dataclass(frozen=True)
class Solution:
    """Placement plus backup counts.

    ``assignment[k][j]`` is the 0-based category of VNF j of SFC k, or None when
    the VNF is not placed (only produced by decoders; such solutions are penalized).
    ``dedicated_backups[k][j]`` counts backups in the same category as the primary.
    ``shared_backups[k][i]`` is the pool size of SFC k in category i.
    """

    assignment: tuple[tuple[int | None, ...], ...]
    dedicated_backups: tuple[tuple[int, ...], ...]
    shared_backups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(tuple(a) for a in self.assignment))
        object.__setattr__(self, "dedicated_backups", tuple(tuple(int(x) for x in b) for b in self.dedicated_backups))
        object.__setattr__(self, "shared_backups", tuple(tuple(int(x) for x in b) for b in self.shared_backups))

    @classmethod
    def empty(cls, infra: Infrastructure, workload: Workload) -> "Solution":
        return cls(
            assignment=[[None] * s.length for s in workload],
            dedicated_backups=[[0] * s.length for s in workload],
            shared_backups=[[0] * infra.num_categories for _ in workload],
        )

    @property
    def complete(self) -> bool:
        return all(c is not None for row in self.assignment for c in row)

    def hosted_counts(self, k: int, num_categories: int) -> list[int]:
        """N_{i,k}: number of SFC k's VNFs placed in each category."""
        counts = [0] * num_categories
        for c in self.assignment[k]:
            if c is not None:
                counts[c] += 1
        return counts

    def to_dict(self) -> dict:
        """File form: category indices are 1-based, missing VNFs are null."""
        return {
            "assignment": [[None if c is None else c + 1 for c in row] for row in self.assignment],
            "dedicated_backups": [list(r) for r in self.dedicated_backups],
            "shared_backups": [list(r) for r in self.shared_backups],
        }

    @classmethod
    def from_dict(cls, doc: dict, infra: Infrastructure, workload: Workload) -> "Solution":
        try:
            assignment = doc["assignment"]
        except (KeyError, TypeError) as exc:
            raise DatasetError("solution document needs an 'assignment' field") from exc
        m = infra.num_categories
        if len(assignment) != len(workload):
            raise DatasetError(f"assignment has {len(assignment)} SFCs, dataset has {len(workload)}")
        rows = []
        for k, (row, sfc) in enumerate(zip(assignment, workload)):
            if len(row) != sfc.length:
                raise DatasetError(f"assignment[{k}] has {len(row)} entries, SFC {k} has {sfc.length} VNFs")
            out = []
            for j, c in enumerate(row):
                if c is None:
                    out.append(None)
                    continue
                if not isinstance(c, int) or isinstance(c, bool) or not 1 <= c <= m:
                    raise DatasetError(f"assignment[{k}][{j}] = {c!r} is not a category in 1..{m}")
                out.append(c - 1)
            rows.append(out)
        ded = doc.get("dedicated_backups") or [[0] * s.length for s in workload]
        shr = doc.get("shared_backups") or [[0] * m for _ in workload]
        if len(ded) != len(workload) or any(len(r) != s.length for r, s in zip(ded, workload)):
            raise DatasetError("dedicated_backups shape does not match the workload")
        if len(shr) != len(workload) or any(len(r) != m for r in shr):
            raise DatasetError(f"shared_backups must hold {m} counts per SFC")
        for name, table in (("dedicated_backups", ded), ("shared_backups", shr)):
            for k, r in enumerate(table):
                for j, x in enumerate(r):
                    if not isinstance(x, int) or isinstance(x, bool) or x < 0:
                        raise DatasetError(f"{name}[{k}][{j}] = {x!r} is not a non-negative integer")
        return cls(rows, ded, shr)


# -- dataset documents --------------------------------------------------------

_CATEGORY_KEYS = ("node_count", "clock", "cost_active", "cost_standby", "fail_active", "fail_standby")
_SFC_KEYS = ("loads", "deadline", "reliability_target", "strategy")
_OBJECTIVE_KEYS = ("alpha", "beta", "penalty_weight", "holding_time")


def _number(value, where: str, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DatasetError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise DatasetError(f"{where}: non-finite value")
    if integer and not (isinstance(value, int) or float(value).is_integer()):
        raise DatasetError(f"{where}: expected an integer, got {value!r}")
    return int(value) if integer else float(value)


def dataset_from_dict(doc: dict) -> tuple[Infrastructure, Workload, ObjectiveConfig]:
    if not isinstance(doc, dict):
        raise DatasetError("dataset document must be a JSON object")
    for key in ("infrastructure", "workload"):
        if key not in doc:
            raise DatasetError(f"missing top-level section '{key}'")

    cats = []
    for i, raw in enumerate(doc["infrastructure"]):
        where = f"infrastructure[{i}]"
        missing = [k for k in _CATEGORY_KEYS if k not in raw]
        if missing:
            raise DatasetError(f"{where}: missing {', '.join(missing)}")
        vals = {k: _number(raw[k], f"{where}.{k}", integer=(k == "node_count")) for k in _CATEGORY_KEYS}
        try:
            cats.append(NodeCategory(**vals))
        except DatasetError as exc:
            raise DatasetError(f"{where}: {exc}") from None

    sfcs = []
    for k, raw in enumerate(doc["workload"]):
        where = f"workload[{k}]"
        missing = [key for key in _SFC_KEYS if key not in raw]
        if missing:
            raise DatasetError(f"{where}: missing {', '.join(missing)}")
        if not isinstance(raw["loads"], list):
            raise DatasetError(f"{where}.loads: expected an array")
        loads = [_number(x, f"{where}.loads[{j}]") for j, x in enumerate(raw["loads"])]
        if "length" in raw and _number(raw["length"], f"{where}.length", integer=True) != len(loads):
            raise DatasetError(f"{where}: length={raw['length']} but {len(loads)} loads given")
        strategy = _number(raw["strategy"], f"{where}.strategy", integer=True)
        if strategy not in (1, 2, 3, 4):
            raise DatasetError(f"{where}.strategy: must be 1-4, got {strategy}")
        try:
            sfcs.append(SfcRequest(
                loads=loads,
                deadline=_number(raw["deadline"], f"{where}.deadline"),
                reliability_target=_number(raw["reliability_target"], f"{where}.reliability_target"),
                strategy=Strategy(strategy),
            ))
        except DatasetError as exc:
            raise DatasetError(f"{where}: {exc}") from None

    obj_raw = doc.get("objective", {})
    unknown = set(obj_raw) - set(_OBJECTIVE_KEYS) - {"raw_fitness"}
    if unknown:
        raise DatasetError(f"objective: unknown keys {sorted(unknown)}")
    obj_vals = {k: _number(v, f"objective.{k}") for k, v in obj_raw.items() if k != "raw_fitness"}
    if "raw_fitness" in obj_raw:
        obj_vals["raw_fitness"] = bool(obj_raw["raw_fitness"])
    try:
        objective = ObjectiveConfig(**obj_vals)
    except DatasetError as exc:
        raise DatasetError(f"objective: {exc}") from None
    return Infrastructure(tuple(cats)), Workload(tuple(sfcs)), objective


def dataset_to_dict(infra: Infrastructure, workload: Workload, objective: ObjectiveConfig) -> dict:
    return {
        "infrastructure": [{k: getattr(c, k) for k in _CATEGORY_KEYS} for c in infra.categories],
        "workload": [
            {"loads": list(s.loads), "deadline": s.deadline,
             "reliability_target": s.reliability_target, "strategy": int(s.strategy)}
            for s in workload
        ],
        "objective": {k: getattr(objective, k) for k in _OBJECTIVE_KEYS},
    }


def load_dataset(source: IO[str] | IO[bytes] | str | bytes) -> tuple[Infrastructure, Workload, ObjectiveConfig]:
    """Parse and validate a dataset document from a stream or a JSON string."""
    text = source if isinstance(source, (str, bytes)) else source.read()
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"malformed JSON: {exc}") from None
    return dataset_from_dict(doc)


def _reject_constant(name):
    raise DatasetError(f"non-finite number {name} is not allowed")


def dumps_dataset(infra: Infrastructure, workload: Workload, objective: ObjectiveConfig) -> str:
    return json.dumps(dataset_to_dict(infra, workload, objective), indent=2) + "\n"


def save_dataset(stream: IO[str], infra: Infrastructure, workload: Workload, objective: ObjectiveConfig) -> None:
    stream.write(dumps_dataset(infra, workload, objective))


# -- generation ----------------------------------------------------------------

RELIABILITY_LEVELS = (0.99, 0.999, 0.9999, 0.99999, 0.999999)


@dataclass(frozen=True)
class GeneratorSpec:
    """Sampling ranges for random instances. Integer ranges are inclusive."""

    categories: tuple[int, int] = (2, 3)
    clock: tuple[int, int] = (1, 5)
    node_count: tuple[int, int] = (50, 700)
    fail_active: tuple[float, float] = (0.008, 0.04)
    standby_fail_ratio: float = 0.1
    cost_active: tuple[float, float] = (5.0, 25.0)
    standby_cost_ratio: float = 0.1
    num_sfcs: tuple[int, int] = (5, 15)
    chain_length: tuple[int, int] = (2, 5)
    loads: tuple[int, int] = (5, 50)
    deadline: tuple[int, int] = (10, 100)
    deadline_slack: float = 1.2
    reliability_levels: tuple[float, ...] = RELIABILITY_LEVELS
    strategies: tuple[int, ...] = (1, 2, 3, 4)

    def __post_init__(self):
        for name in ("categories", "clock", "node_count", "fail_active", "cost_active",
                     "num_sfcs", "chain_length", "loads", "deadline"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name}: empty range [{lo}, {hi}]")
        if self.categories[0] < 1 or self.node_count[0] < 1 or self.num_sfcs[0] < 1 or self.chain_length[0] < 1:
            raise ValueError("categories, node_count, num_sfcs and chain_length must be >= 1")
        if self.clock[0] <= 0 or self.loads[0] <= 0 or self.deadline[0] <= 0:
            raise ValueError("clock, loads and deadline must be positive")
        if self.fail_active[0] < 0 or self.cost_active[0] < 0:
            raise ValueError("rates and costs must be non-negative")
        if not (0 <= self.standby_fail_ratio <= 1 and 0 <= self.standby_cost_ratio <= 1):
            raise ValueError("standby ratios must lie in [0, 1]")
        if not self.reliability_levels or any(not 0 < r < 1 for r in self.reliability_levels):
            raise ValueError("reliability_levels must be non-empty and inside (0, 1)")
        if not self.strategies or any(s not in (1, 2, 3, 4) for s in self.strategies):
            raise ValueError("strategies must be a non-empty subset of 1..4")


# targets above three nines are out of reach on a handful of nodes
TINY_SPEC = GeneratorSpec(categories=(2, 2), node_count=(2, 3), num_sfcs=(1, 1), chain_length=(2, 2),
                          reliability_levels=(0.9, 0.99, 0.999))


def generate_dataset(spec: GeneratorSpec, seed: int) -> tuple[Infrastructure, Workload]:
    rng = np.random.default_rng(seed)
    m = int(rng.integers(spec.categories[0], spec.categories[1] + 1))
    cats = []
    for _ in range(m):
        fa = round(float(rng.uniform(*spec.fail_active)), 5)
        pa = round(float(rng.uniform(*spec.cost_active)), 2)
        cats.append(NodeCategory(
            node_count=int(rng.integers(spec.node_count[0], spec.node_count[1] + 1)),
            clock=float(rng.integers(spec.clock[0], spec.clock[1] + 1)),
            cost_active=pa,
            cost_standby=round(pa * spec.standby_cost_ratio, 4),
            fail_active=fa,
            fail_standby=round(fa * spec.standby_fail_ratio, 7),
        ))
    fastest = max(c.clock for c in cats)

    k = int(rng.integers(spec.num_sfcs[0], spec.num_sfcs[1] + 1))
    sfcs = []
    for _ in range(k):
        n = int(rng.integers(spec.chain_length[0], spec.chain_length[1] + 1))
        loads = [float(x) for x in rng.integers(spec.loads[0], spec.loads[1] + 1, size=n)]
        deadline = float(rng.integers(spec.deadline[0], spec.deadline[1] + 1))
        # keep every SFC schedulable on the fastest category
        deadline = max(deadline, float(math.ceil(spec.deadline_slack * sum(loads) / fastest)))
        sfcs.append(SfcRequest(
            loads=loads,
            deadline=deadline,
            reliability_target=float(spec.reliability_levels[int(rng.integers(len(spec.reliability_levels)))]),
            strategy=Strategy(int(spec.strategies[int(rng.integers(len(spec.strategies)))])),
        ))
    return Infrastructure(tuple(cats)), Workload(tuple(sfcs))


def reference_instance(node_scale: float = 1.0) -> tuple[Infrastructure, Workload, ObjectiveConfig]:
    """The published 3-category, 10-SFC experiment instance.

    Entries the published table elides are filled with fixed values drawn from the
    same ranges. ``node_scale`` shrinks the per-category node counts (0.2 gives the
    160-node profile used for quick comparisons).
    """
    counts = [200, 300, 300]
    if node_scale != 1.0:
        counts = [max(1, int(round(c * node_scale))) for c in counts]
    infra = Infrastructure((
        NodeCategory(counts[0], 5.0, 25.0, 2.5, 0.008, 0.0008),
        NodeCategory(counts[1], 4.0, 20.0, 2.0, 0.01, 0.001),
        NodeCategory(counts[2], 1.0, 5.0, 0.5, 0.04, 0.004),
    ))
    rows = [
        ([10, 20, 15, 30, 9], 80, 0.99, 1),
        ([8, 10, 12, 6, 9], 10, 0.999, 3),
        ([25, 15, 30, 20], 60, 0.9999, 2),
        ([12, 18, 24], 40, 0.99999, 4),
        ([30, 15], 25, 0.999999, 1),
        ([14, 22, 16, 28], 50, 0.999, 2),
        ([35, 10, 20], 70, 0.9999, 3),
        ([18, 12, 26, 8, 16], 45, 0.99999, 4),
        ([40, 25], 30, 0.99, 2),
        ([20, 40, 25, 35, 45], 100, 0.999, 1),
    ]
    workload = Workload(tuple(SfcRequest(loads, deadline, r, Strategy(b)) for loads, deadline, r, b in rows))
    return infra, workload, ObjectiveConfig(alpha=0.65, beta=0.35)


def vnf_sfc_membership(workload: Workload) -> np.ndarray:
    """Boolean (total_vnfs, K) matrix: row v is one-hot on the SFC owning global VNF v."""
    out = np.zeros((workload.total_vnfs, len(workload)), dtype=bool)
    for v, (k, _) in enumerate(workload.vnf_index()):
        out[v, k] = True
    return out


def category_arrays(infra: Infrastructure) -> dict[str, np.ndarray]:
    return {
        name: np.array([getattr(c, name) for c in infra.categories], dtype=float)
        for name in _CATEGORY_KEYS
    }


def flat_loads(workload: Workload) -> np.ndarray:
    return np.array([x for s in workload for x in s.loads], dtype=float)


def validate_shape(solution: Solution, infra: Infrastructure, workload: Workload) -> None:
    """Check constraint (a)/(e) structure and the backup-family invariants."""
    m = infra.num_categories
    if len(solution.assignment) != len(workload):
        raise DatasetError("solution SFC count does not match the workload")
    for k, sfc in enumerate(workload):
        row = solution.assignment[k]
        if len(row) != sfc.length or len(solution.dedicated_backups[k]) != sfc.length:
            raise DatasetError(f"SFC {k}: solution rows do not match chain length {sfc.length}")
        if len(solution.shared_backups[k]) != m:
            raise DatasetError(f"SFC {k}: shared_backups needs {m} entries")
        for j, c in enumerate(row):
            if c is not None and not 0 <= c < m:
                raise DatasetError(f"assignment[{k}][{j}] = {c} out of range")
        if any(b < 0 for b in solution.dedicated_backups[k]) or any(b < 0 for b in solution.shared_backups[k]):
            raise DatasetError(f"SFC {k}: negative backup count")
        if sfc.strategy.dedicated and any(solution.shared_backups[k]):
            raise DatasetError(f"SFC {k}: shared backups on a dedicated-strategy SFC")
        if sfc.strategy.shared and any(solution.dedicated_backups[k]):
            raise DatasetError(f"SFC {k}: dedicated backups on a shared-strategy SFC")
        hosted = solution.hosted_counts(k, m)
        for i in range(m):
            if hosted[i] == 0 and solution.shared_backups[k][i]:
                raise DatasetError(f"SFC {k}: shared pool in category {i + 1} which hosts none of its VNFs")
        for j, c in enumerate(row):
            if c is None and solution.dedicated_backups[k][j]:
                raise DatasetError(f"SFC {k}: backups for unplaced VNF {j}")


__all__ = [
    "DatasetError", "Strategy", "NodeCategory", "Infrastructure", "SfcRequest", "Workload",
    "ObjectiveConfig", "Solution", "GeneratorSpec", "TINY_SPEC", "RELIABILITY_LEVELS",
    "load_dataset", "save_dataset", "dumps_dataset", "dataset_from_dict", "dataset_to_dict",
    "generate_dataset", "reference_instance", "vnf_sfc_membership", "category_arrays", "flat_loads",
    "validate_shape",
]
