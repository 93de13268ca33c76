import math

import pytest

from sfcplace.evaluator import (InfeasibleInstanceError, capacity_usage, combine, evaluate, normalization_bounds,
                                sfc_delay)
from sfcplace.model import (Infrastructure, NodeCategory, ObjectiveConfig, SfcRequest, Solution, Strategy, Workload,
                            reference_instance)

FAST = NodeCategory(4, 5, 25, 2.5, 0.008, 0.0008)
SLOW = NodeCategory(4, 1, 5, 0.5, 0.04, 0.004)


def setup(strategy=1, loads=(10, 20), deadline=50, target=0.9):
    infra = Infrastructure((FAST, SLOW))
    workload = Workload((SfcRequest(list(loads), deadline, target, Strategy(strategy)),))
    return infra, workload, ObjectiveConfig()


def test_delay_on_fast_category():
    infra, w, _ = setup()
    assert sfc_delay(Solution([[0, 0]], [[0, 0]], [[0, 0]]), 0, infra, w) == 6.0


def test_delay_monotone_in_clock():
    infra, w, _ = setup(loads=(10,))
    slow = sfc_delay(Solution([[1]], [[0]], [[0, 0]]), 0, infra, w)
    fast = sfc_delay(Solution([[0]], [[0]], [[0, 0]]), 0, infra, w)
    assert (slow, fast) == (10.0, 2.0)


def test_usage_counts_dedicated_backups():
    infra, w, _ = setup()
    usage, ok = capacity_usage(Solution([[0, 0]], [[1, 1]], [[0, 0]]), infra, w)
    assert usage == [4, 0] and ok


def test_usage_counts_shared_pool_once():
    infra, w, _ = setup(strategy=4)
    usage, _ = capacity_usage(Solution([[0, 0]], [[0, 0]], [[1, 0]]), infra, w)
    assert usage[0] == 3


def test_usage_ignores_pool_in_unhosting_category():
    infra, w, _ = setup(strategy=4)
    usage, _ = capacity_usage(Solution([[0, 0]], [[0, 0]], [[0, 5]]), infra, w)
    assert usage == [2, 0]


def test_bounds_formulas():
    infra, w, cfg = reference_instance()
    b = normalization_bounds(infra, w, cfg)
    load = sum(sum(s.loads) for s in w)
    assert b.tau_min == pytest.approx(load / 5)
    assert b.tau_max == pytest.approx(load / 1)
    assert b.p_max == pytest.approx(200 * 25 + 300 * 20 + 300 * 5)
    assert b.p_min == pytest.approx(w.total_vnfs * 5)


def test_bounds_reject_oversubscribed_instance():
    infra = Infrastructure((NodeCategory(1, 1, 1, 0.1, 0.01, 0.001),))
    w = Workload((SfcRequest([1, 1], 10, 0.9, Strategy(1)),))
    with pytest.raises(InfeasibleInstanceError):
        normalization_bounds(infra, w)


def test_feasible_solution_fitness_equals_objective():
    infra, w, cfg = setup()
    b = normalization_bounds(infra, w, cfg)
    rep = evaluate(Solution([[0, 0]], [[0, 0]], [[0, 0]]), infra, w, cfg, b)
    assert rep.penalty_count == 0 and rep.feasible
    assert rep.fitness == rep.objective
    assert rep.objective == pytest.approx(cfg.alpha * rep.normalized_cost + cfg.beta * rep.normalized_delay)
    assert rep.normalized_cost == pytest.approx((50 - b.p_min) / b.p_max)


def test_missing_vnf_and_deadline_violation_cost_two_penalties():
    infra = Infrastructure((FAST, SLOW))
    w = Workload((SfcRequest([10, 20], 100, 0.5, Strategy(1)), SfcRequest([30], 5, 0.5, Strategy(1))))
    cfg = ObjectiveConfig()
    b = normalization_bounds(infra, w, cfg)
    rep = evaluate(Solution([[0, None], [1]], [[0, 0], [0]], [[0, 0], [0, 0]]), infra, w, cfg, b)
    assert rep.missing_vnfs == 1 and not rep.placement_complete
    assert not rep.per_sfc[1].deadline_ok
    assert rep.penalty_count == 2
    assert rep.fitness == pytest.approx(rep.objective + 2 * cfg.penalty_weight)


def test_capacity_overflow_is_penalized_per_node():
    infra, w, cfg = setup()
    rep = evaluate(Solution([[0, 0]], [[2, 2]], [[0, 0]]), infra, w, cfg, normalization_bounds(infra, w, cfg))
    assert not rep.capacity_ok and rep.capacity_overflow == 2
    assert rep.penalty_count == 2


def test_backup_that_fixes_reliability_lowers_fitness():
    infra, w, cfg = setup(target=0.999)
    b = normalization_bounds(infra, w, cfg)
    without = evaluate(Solution([[0, 0]], [[0, 0]], [[0, 0]]), infra, w, cfg, b)
    with_backups = evaluate(Solution([[0, 0]], [[1, 1]], [[0, 0]]), infra, w, cfg, b)
    assert not without.per_sfc[0].reliability_ok and with_backups.per_sfc[0].reliability_ok
    assert with_backups.fitness < without.fitness


def test_raw_fitness_mode_uses_totals():
    infra, w, _ = setup()
    cfg = ObjectiveConfig(raw_fitness=True)
    rep = evaluate(Solution([[0, 0]], [[0, 0]], [[0, 0]]), infra, w, cfg, normalization_bounds(infra, w, cfg))
    assert rep.fitness == pytest.approx(cfg.alpha * 50 + cfg.beta * 6)


def test_combine_accepts_arrays():
    import numpy as np

    infra, w, cfg = setup()
    b = normalization_bounds(infra, w, cfg)
    _, _, obj, fit = combine(np.array([50.0, 60.0]), np.array([6.0, 6.0]), np.array([0, 1]), cfg, b)
    assert fit[1] - obj[1] == cfg.penalty_weight and fit[0] == obj[0]


def test_report_serializes():
    infra, w, cfg = setup()
    rep = evaluate(Solution([[0, 0]], [[0, 0]], [[0, 0]]), infra, w, cfg, normalization_bounds(infra, w, cfg))
    d = rep.to_dict()
    assert d["feasible"] is True and len(d["per_sfc"]) == 1
    assert math.isfinite(d["objective"])
