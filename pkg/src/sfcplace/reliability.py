"""Reliability and cost kernels for the four backup strategies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import mpmath

from .model import Infrastructure, ObjectiveConfig, Solution, Strategy, Workload
from .oracles import markov_survival, mc_survival

# closed form for standby groups is trusted up to this many spares
CLOSED_FORM_MAX_BACKUPS = 12
COLD_STANDBY_RATE = 1e-12
_CLOSED_FORM_DPS = 60


class Mode(Enum):
    ACTIVE = "active"
    STANDBY = "standby"


@dataclass(frozen=True)
class FailureLaw:
    rate: float
    mode: Mode = Mode.ACTIVE

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("failure rate must be >= 0")


@dataclass(frozen=True)
class GroupSpec:
    """A pool of ``primaries`` nodes in one category sharing ``backups`` spares."""

    primaries: int
    backups: int
    fail_active: float
    fail_standby: float
    horizon: float

    def __post_init__(self):
        if self.primaries < 1:
            raise ValueError("primaries must be >= 1")
        if self.backups < 0:
            raise ValueError("backups must be >= 0")
        if not self.horizon > 0:
            raise ValueError("horizon must be > 0")
        if self.fail_active < 0 or self.fail_standby < 0:
            raise ValueError("failure rates must be >= 0")


def failure_cdf(law: FailureLaw | float, t: float) -> float:
    """Probability that a node with exponential lifetime has failed by time ``t``."""
    rate = law.rate if isinstance(law, FailureLaw) else float(law)
    if t < 0:
        raise ValueError("t must be >= 0")
    if rate < 0:
        raise ValueError("failure rate must be >= 0")
    return -math.expm1(-rate * t)


def rel_dedicated_active(b: int, fail_prob: float) -> float:
    """One primary plus ``b`` active replicas: lost only if all b+1 fail."""
    return 1.0 - fail_prob ** (b + 1)


def k_out_of_n_survival(primaries: int, backups: int, fail_prob: float) -> float:
    """P(at least ``primaries`` of primaries+backups independent active nodes survive)."""
    n = primaries + backups
    q = 1.0 - fail_prob
    if backups == 0:
        return q ** primaries
    terms = [math.comb(n, m) * q ** m * fail_prob ** (n - m) for m in range(primaries, n + 1)]
    return min(1.0, math.fsum(terms))


def rel_shared_active(spec: GroupSpec) -> float:
    return k_out_of_n_survival(spec.primaries, spec.backups, failure_cdf(spec.fail_active, spec.horizon))


def _standby_closed_form(n: int, b: int, fa: float, fs: float, t: float) -> float:
    """Warm-standby survival, evaluated in extended precision.

    The alternating sum cancels catastrophically in double precision once
    n*fa/fs is large, so the terms are carried with ~60 significant digits.
    """
    with mpmath.workdps(_CLOSED_FORM_DPS):
        fa_, fs_, t_ = mpmath.mpf(fa), mpmath.mpf(fs), mpmath.mpf(t)
        lam = n * fa_
        rates = [lam + m * fs_ for m in range(b + 1)]
        total = mpmath.mpf(0)
        for k in range(b + 1):
            prod = mpmath.mpf(1)
            for m in range(b + 1):
                if m != k:
                    prod *= rates[m]
            term = mpmath.binomial(b, k) * mpmath.exp(-(lam + k * fs_) * t_) * prod
            total += -term if k % 2 else term
        value = total / (mpmath.factorial(b) * fs_ ** b)
        return float(value)


def _cold_standby(n: int, b: int, fa: float, t: float) -> float:
    x = n * fa * t
    return math.exp(-x) * math.fsum(x ** k / math.factorial(k) for k in range(b + 1))


@lru_cache(maxsize=None)
def standby_group_survival(primaries: int, backups: int, fa: float, fs: float, t: float) -> float:
    """Survival of ``primaries`` actives backed by ``backups`` warm spares over [0, t]."""
    if backups == 0:
        return math.exp(-primaries * fa * t)
    if fs < COLD_STANDBY_RATE:
        return min(1.0, _cold_standby(primaries, backups, fa, t))
    if backups <= CLOSED_FORM_MAX_BACKUPS:
        value = _standby_closed_form(primaries, backups, fa, fs, t)
        if math.isfinite(value) and 0.0 <= value <= 1.0 + 1e-9:
            return min(1.0, value)
    return markov_survival(primaries, backups, fa, fs, t)


def rel_dedicated_standby(spec: GroupSpec) -> float:
    if spec.primaries != 1:
        raise ValueError("dedicated standby groups protect exactly one primary")
    return standby_group_survival(1, spec.backups, spec.fail_active, spec.fail_standby, spec.horizon)


def rel_shared_standby(spec: GroupSpec) -> float:
    return standby_group_survival(spec.primaries, spec.backups, spec.fail_active, spec.fail_standby, spec.horizon)


@lru_cache(maxsize=None)
def group_reliability(strategy: int, primaries: int, backups: int, fa: float, fs: float, t: float) -> float:
    """Reliability of one protection group for the given strategy.

    For dedicated strategies ``primaries`` is 1 and the group is a single VNF;
    for shared strategies it is every VNF of an SFC placed in one category.
    """
    if strategy in (Strategy.DEDICATED_ACTIVE, Strategy.SHARED_ACTIVE):
        return k_out_of_n_survival(primaries, backups, -math.expm1(-fa * t))
    return standby_group_survival(primaries, backups, fa, fs, t)


def sfc_reliability(solution: Solution, k: int, infra: Infrastructure, workload: Workload,
                    cfg: ObjectiveConfig) -> float:
    """Reliability of SFC k. Unplaced VNFs contribute a factor of 1 (they are penalized elsewhere)."""
    strategy = workload.sfcs[k].strategy
    t = cfg.holding_time
    cats = infra.categories
    omega = 1.0
    if strategy.dedicated:
        for c, b in zip(solution.assignment[k], solution.dedicated_backups[k]):
            if c is None:
                continue
            cat = cats[c]
            omega *= group_reliability(strategy, 1, b, cat.fail_active, cat.fail_standby, t)
    else:
        hosted = solution.hosted_counts(k, len(cats))
        for i, n in enumerate(hosted):
            if n:
                cat = cats[i]
                omega *= group_reliability(strategy, n, solution.shared_backups[k][i],
                                           cat.fail_active, cat.fail_standby, t)
    return omega


def sfc_cost(solution: Solution, k: int, infra: Infrastructure, workload: Workload) -> float:
    strategy = workload.sfcs[k].strategy
    cats = infra.categories
    cost = 0.0
    if strategy.dedicated:
        for c, b in zip(solution.assignment[k], solution.dedicated_backups[k]):
            if c is None:
                continue
            cat = cats[c]
            if strategy == Strategy.DEDICATED_ACTIVE:
                cost += (b + 1) * cat.cost_active
            else:
                cost += cat.cost_active + b * cat.cost_standby
    else:
        hosted = solution.hosted_counts(k, len(cats))
        for i, n in enumerate(hosted):
            if not n:
                continue
            cat, b = cats[i], solution.shared_backups[k][i]
            if strategy == Strategy.SHARED_ACTIVE:
                cost += (n + b) * cat.cost_active
            else:
                cost += n * cat.cost_active + b * cat.cost_standby
    return cost


def mc_reliability_oracle(spec: GroupSpec, trials: int, seed: int) -> float:
    """Simulated survival probability of a warm-standby group (set fail_standby == fail_active for an active pool)."""
    return mc_survival(spec.primaries, spec.backups, spec.fail_active, spec.fail_standby,
                       spec.horizon, trials, seed)


def markov_reliability_oracle(spec: GroupSpec) -> float:
    return markov_survival(spec.primaries, spec.backups, spec.fail_active, spec.fail_standby, spec.horizon)
