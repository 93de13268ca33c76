import json

import pytest
from hypothesis import given, settings, strategies as st

from sfcplace.model import (TINY_SPEC, DatasetError, GeneratorSpec, Infrastructure, NodeCategory,
                            ObjectiveConfig, SfcRequest, Solution, Strategy, Workload, dataset_to_dict,
                            dumps_dataset, generate_dataset, load_dataset, reference_instance, validate_shape)


def doc(**overrides):
    base = {
        "infrastructure": [{"node_count": 2, "clock": 5, "cost_active": 25, "cost_standby": 2.5,
                            "fail_active": 0.01, "fail_standby": 0.001}],
        "workload": [{"loads": [10], "deadline": 10, "reliability_target": 0.99, "strategy": 1}],
    }
    base.update(overrides)
    return json.dumps(base)


def test_reference_instance_totals():
    infra, workload, cfg = reference_instance()
    assert infra.num_categories == 3
    assert infra.total_nodes == 800
    assert [c.clock for c in infra.categories] == [5, 4, 1]
    assert [c.node_count for c in infra.categories] == [200, 300, 300]
    assert len(workload) == 10
    assert (cfg.alpha, cfg.beta) == (0.65, 0.35)


def test_scaled_reference_instance_has_160_nodes():
    infra, _, _ = reference_instance(0.2)
    assert infra.total_nodes == 160


def test_minimal_document_loads():
    infra, workload, cfg = load_dataset(doc())
    assert infra.total_nodes == 2
    assert workload.total_vnfs == 1
    assert cfg == ObjectiveConfig()


def test_standby_rate_above_active_rejected_with_category():
    bad = doc(infrastructure=[{"node_count": 2, "clock": 5, "cost_active": 25, "cost_standby": 2.5,
                               "fail_active": 0.001, "fail_standby": 0.01}])
    with pytest.raises(DatasetError, match=r"infrastructure\[0\]"):
        load_dataset(bad)


@pytest.mark.parametrize("text", ['{"infrastructure": []}', "[1, 2]", "{not json", '{"infrastructure": [], "workload": []}'])
def test_malformed_documents_rejected(text):
    with pytest.raises(DatasetError):
        load_dataset(text)


def test_non_finite_numbers_rejected():
    with pytest.raises(DatasetError):
        load_dataset(doc().replace('"deadline": 10', '"deadline": NaN'))


@pytest.mark.parametrize("field, value", [("reliability_target", 1.0), ("reliability_target", 0), ("strategy", 5),
                                          ("loads", [0]), ("loads", []), ("deadline", -1)])
def test_sfc_field_validation(field, value):
    raw = json.loads(doc())
    raw["workload"][0][field] = value
    with pytest.raises(DatasetError, match=r"workload\[0\]"):
        load_dataset(json.dumps(raw))


def test_length_field_must_match_loads():
    raw = json.loads(doc())
    raw["workload"][0]["length"] = 2
    with pytest.raises(DatasetError, match="length"):
        load_dataset(json.dumps(raw))


def test_category_invariants():
    with pytest.raises(DatasetError):
        NodeCategory(0, 1.0, 1.0, 0.1, 0.01, 0.001)
    with pytest.raises(DatasetError):
        NodeCategory(1, 0.0, 1.0, 0.1, 0.01, 0.001)
    with pytest.raises(DatasetError):
        NodeCategory(1, 1.0, 1.0, 2.0, 0.01, 0.001)


def test_generator_is_deterministic():
    a = dumps_dataset(*generate_dataset(GeneratorSpec(), 11), ObjectiveConfig())
    b = dumps_dataset(*generate_dataset(GeneratorSpec(), 11), ObjectiveConfig())
    assert a == b


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_generated_instances_respect_ranges(seed):
    spec = GeneratorSpec()
    infra, workload = generate_dataset(spec, seed)
    assert spec.categories[0] <= infra.num_categories <= spec.categories[1]
    assert spec.num_sfcs[0] <= len(workload) <= spec.num_sfcs[1]
    fastest = max(c.clock for c in infra.categories)
    for c in infra.categories:
        assert spec.node_count[0] <= c.node_count <= spec.node_count[1]
        assert spec.fail_active[0] <= c.fail_active <= spec.fail_active[1]
        assert c.fail_standby <= c.fail_active and c.cost_standby <= c.cost_active
    for s in workload:
        assert spec.chain_length[0] <= s.length <= spec.chain_length[1]
        assert all(spec.loads[0] <= x <= spec.loads[1] for x in s.loads)
        assert s.reliability_target in spec.reliability_levels
        assert sum(s.loads) / fastest <= s.deadline


def test_tiny_spec_is_oracle_sized():
    for seed in range(30):
        infra, workload = generate_dataset(TINY_SPEC, seed)
        assert infra.num_categories == 2 and infra.total_nodes <= 8
        assert len(workload) == 1 and workload.total_vnfs == 2


def test_save_load_round_trip():
    infra, workload, cfg = reference_instance()
    again = load_dataset(dumps_dataset(infra, workload, cfg))
    assert again == (infra, workload, cfg)
    assert dataset_to_dict(*again) == dataset_to_dict(infra, workload, cfg)


def test_with_strategy_overrides_every_sfc():
    _, workload, _ = reference_instance()
    forced = workload.with_strategy(4)
    assert {s.strategy for s in forced} == {Strategy.SHARED_STANDBY}
    assert [s.loads for s in forced] == [s.loads for s in workload]


def test_offsets_and_vnf_index():
    w = Workload((SfcRequest([1, 2], 10, 0.9, Strategy(1)), SfcRequest([3], 10, 0.9, Strategy(3))))
    assert w.offsets() == [0, 2]
    assert w.vnf_index() == [(0, 0), (0, 1), (1, 0)]


def tiny():
    infra = Infrastructure((NodeCategory(3, 5, 25, 2.5, 0.01, 0.001), NodeCategory(3, 1, 5, 0.5, 0.04, 0.004)))
    workload = Workload((SfcRequest([10, 20], 50, 0.9, Strategy(3)),))
    return infra, workload


def test_solution_file_form_is_one_based():
    infra, workload = tiny()
    sol = Solution([[0, 1]], [[0, 0]], [[1, 0]])
    d = sol.to_dict()
    assert d["assignment"] == [[1, 2]]
    assert Solution.from_dict(d, infra, workload) == sol


def test_solution_rejects_category_out_of_range_naming_position():
    infra, workload = tiny()
    with pytest.raises(DatasetError, match=r"assignment\[0\]\[1\]"):
        Solution.from_dict({"assignment": [[1, 3]]}, infra, workload)


def test_solution_rejects_wrong_length():
    infra, workload = tiny()
    with pytest.raises(DatasetError, match="has 1 entries"):
        Solution.from_dict({"assignment": [[1]]}, infra, workload)


def test_validate_shape_enforces_family_invariants():
    infra, workload = tiny()
    validate_shape(Solution([[0, 0]], [[0, 0]], [[2, 0]]), infra, workload)
    with pytest.raises(DatasetError, match="dedicated backups"):
        validate_shape(Solution([[0, 0]], [[1, 0]], [[0, 0]]), infra, workload)
    with pytest.raises(DatasetError, match="hosts none"):
        validate_shape(Solution([[0, 0]], [[0, 0]], [[0, 1]]), infra, workload)


def test_objective_weights_validated():
    with pytest.raises(DatasetError):
        ObjectiveConfig(alpha=-0.1)
