"""Benchmark harness: loaders, generators, brute force, experiment runner."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submemo.bench import (
    ExperimentConfig,
    brute_force_max,
    brute_force_min,
    gen_synthetic,
    load_dense_matrix,
    load_set_system,
    load_sparse_triplets,
    run_experiment,
    save_dense_matrix,
    save_set_system,
    save_sparse_triplets,
    speedup_ratios,
)
from submemo.core import InputError
from submemo.functions import (
    ClusteredSetCoverData,
    GraphCutData,
    ModularData,
    ProbabilisticSetCoverData,
    SetCoverData,
    make_function,
)
from submemo.maximize import Cardinality, Knapsack
from conftest import ALL_KINDS, zoo_instance


# ---------------------------------------------------------------------------
# dense matrix format
# ---------------------------------------------------------------------------


def test_dense_matrix_round_trip(tmp_path):
    m = np.array([[1.0, 0.5], [0.5, 1.0]])
    path = tmp_path / "m.csv"
    save_dense_matrix(path, m)
    assert path.read_text(encoding="utf-8").startswith("n=2\n")
    back = load_dense_matrix(path)
    assert np.array_equal(back, m)


@given(
    st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, width=64),
        min_size=4,
        max_size=4,
    )
)
@settings(max_examples=40, deadline=None)
def test_dense_matrix_round_trip_bit_exact(tmp_path_factory, values):
    m = np.asarray(values).reshape(2, 2)
    path = tmp_path_factory.mktemp("dense") / "m.csv"
    save_dense_matrix(path, m)
    assert np.array_equal(load_dense_matrix(path), m)


def test_dense_matrix_error_cases(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("2\n1,0\n0,1\n", encoding="utf-8")
    with pytest.raises(InputError):
        load_dense_matrix(bad)
    bad.write_text("n=2\n1,0\n0\n", encoding="utf-8")  # ragged
    with pytest.raises(InputError):
        load_dense_matrix(bad)
    bad.write_text("n=2\n1,x\n0,1\n", encoding="utf-8")  # non-numeric
    with pytest.raises(InputError):
        load_dense_matrix(bad)
    bad.write_text("n=2\n1,inf\n0,1\n", encoding="utf-8")  # non-finite
    with pytest.raises(InputError):
        load_dense_matrix(bad)
    asym = tmp_path / "asym.csv"
    save_dense_matrix(asym, np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(InputError):
        GraphCutData(load_dense_matrix(asym))


# ---------------------------------------------------------------------------
# set systems
# ---------------------------------------------------------------------------


def test_set_system_round_trip(tmp_path):
    data = SetCoverData(sets=[[0, 1], [1, 2], [2]], universe=3)
    path = tmp_path / "sys.json"
    save_set_system(path, data)
    back = load_set_system(path)
    assert isinstance(back, SetCoverData)
    assert [back.item_slice(j).tolist() for j in range(3)] == [[0, 1], [1, 2], [2]]
    F = make_function(3, back)
    assert F.evaluate([0, 1]) == 3.0


def test_set_system_class_selection(tmp_path):
    probs = tmp_path / "p.json"
    probs.write_text(
        json.dumps({"n": 2, "universe": 1, "weights": [1.0], "sets": [[], []], "probs": [[0.5, 0.5]]}),
        encoding="utf-8",
    )
    assert isinstance(load_set_system(probs), ProbabilisticSetCoverData)
    clustered = tmp_path / "c.json"
    clustered.write_text(
        json.dumps(
            {
                "n": 2,
                "universe": 3,
                "weights": [1.0, 1.0, 1.0],
                "sets": [[0, 1], [2]],
                "clusters": [[0, 2], [1]],
            }
        ),
        encoding="utf-8",
    )
    assert isinstance(load_set_system(clustered), ClusteredSetCoverData)


def test_set_system_validation(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps({"n": 1, "universe": 2, "weights": [1.0, 1.0], "sets": [[5]]}),
        encoding="utf-8",
    )
    with pytest.raises(InputError):
        load_set_system(bad)
    bad.write_text(
        json.dumps(
            {
                "n": 1,
                "universe": 2,
                "weights": [1.0, 1.0],
                "sets": [[0]],
                "clusters": [[0, 7]],
            }
        ),
        encoding="utf-8",
    )
    with pytest.raises(InputError):
        load_set_system(bad)
    bad.write_text(json.dumps({"probs": [[0.5, 1.7]]}), encoding="utf-8")
    with pytest.raises(InputError):
        load_set_system(bad)
    bad.write_text("not json", encoding="utf-8")
    with pytest.raises(InputError):
        load_set_system(bad)


def test_triplet_round_trip(tmp_path):
    path = tmp_path / "t.csv"
    trips = [(0, 0, 1.5), (2, 1, 0.25)]
    save_sparse_triplets(path, n=2, buckets=3, triplets=trips)
    n, buckets, back = load_sparse_triplets(path)
    assert (n, buckets) == (2, 3)
    assert back == trips


# ---------------------------------------------------------------------------
# synthetic generators
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_synthetic_determinism_and_validity(kind):
    a = gen_synthetic(kind, 12, seed=77)
    b = gen_synthetic(kind, 12, seed=77)
    Fa = make_function(12, a)
    Fb = make_function(12, b)
    probe = [0, 3, 7]
    assert Fa.evaluate(probe) == Fb.evaluate(probe)
    assert Fa.evaluate([]) == 0.0


def test_synthetic_large_instance_validates():
    data = gen_synthetic("faclocation", 1000, seed=1)
    F = make_function(1000, data)
    assert F.n == 1000
    assert float(data.similarity.min()) >= 0.0


def test_synthetic_gram_kernel_full_rank_no_ridge():
    data = gen_synthetic("logdet", 30, seed=2, params={"dim": 40})
    assert data.ridge == 0.0


def test_synthetic_unknown_kind():
    with pytest.raises(InputError):
        gen_synthetic("nope", 5, seed=0)


# ---------------------------------------------------------------------------
# brute force oracles
# ---------------------------------------------------------------------------


def test_brute_force_modular_answers(rng):
    w = np.array([3.0, -1.0, 2.0, 0.5])
    F = make_function(4, ModularData(w))
    sub, val = brute_force_max(F, Cardinality(2))
    assert sorted(sub.members) == [0, 2] and val == pytest.approx(5.0)
    sub, val = brute_force_min(F)
    assert sub.members == [1] and val == pytest.approx(-1.0)
    sub, val = brute_force_max(F, Knapsack((1.0, 1.0, 1.0, 1.0), 1.0))
    assert sub.members == [0]


def test_brute_force_two_node_cut():
    F = make_function(2, GraphCutData(np.array([[0.0, 1.0], [1.0, 0.0]]), lam=1.0))
    sub, val = brute_force_max(F, Cardinality(2))
    assert sub.members == [0] and val == pytest.approx(1.0)


def test_brute_force_cap():
    F = zoo_instance("modular", 21, seed=3)
    with pytest.raises(InputError):
        brute_force_max(F, Cardinality(2))


# ---------------------------------------------------------------------------
# experiment runner
# ---------------------------------------------------------------------------


def _small_cfg(kind="maximize", algorithm="lazy-greedy", mode="both"):
    functions = [
        ("facloc", zoo_instance("faclocation", 40, seed=5)),
        ("setcov", zoo_instance("setcover", 40, seed=6)),
    ]
    return ExperimentConfig(
        functions=functions,
        algorithm=algorithm,
        mode=mode,
        budgets=(0.1, 0.2),
        repetitions=2,
        seed=9,
        kind=kind,
    )


def test_run_experiment_report_shape(tmp_path):
    records = run_experiment(_small_cfg(), out_dir=tmp_path)
    assert len(records) == 2 * 2 * 2  # functions x budgets x modes
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert len(report["records"]) == len(records)
    assert report["speedups"]
    csv_lines = (tmp_path / "report.csv").read_text(encoding="utf-8").strip().splitlines()
    assert csv_lines[0] == "function,pm_10%,pm_20%,vo_10%,vo_20%"
    assert len(csv_lines) == 3


def test_run_experiment_mode_counter_contract(tmp_path):
    for record in run_experiment(_small_cfg()):
        assert record.error is None
        if record.mode == "pm":
            assert record.counters["oracle_evals"] == 0
        else:
            assert record.counters["gain_evals"] == 0


def test_run_experiment_deterministic_values():
    r1 = run_experiment(_small_cfg(algorithm="stochastic-greedy", mode="pm"))
    r2 = run_experiment(_small_cfg(algorithm="stochastic-greedy", mode="pm"))
    for a, b in zip(r1, r2):
        assert a.value == b.value
        assert a.counters == b.counters
        assert a.selected_size == b.selected_size


def test_run_experiment_pm_vo_same_solution():
    for rec_pm, rec_vo in zip(
        run_experiment(_small_cfg(mode="pm")), run_experiment(_small_cfg(mode="vo"))
    ):
        assert rec_pm.value == pytest.approx(rec_vo.value, rel=1e-9)
        assert rec_pm.selected_size == rec_vo.selected_size


def test_run_experiment_gradients_structure(tmp_path):
    cfg = _small_cfg(kind="gradients")
    records = run_experiment(cfg, out_dir=tmp_path)
    assert len(records) == 2 * 2 * 2  # functions x tasks x modes
    header = (tmp_path / "report.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "function,subgradient_pm,subgradient_vo,supergradient_pm,supergradient_vo"
    for r in records:
        if r.mode == "pm":
            assert r.counters["oracle_evals"] == 0


def test_run_experiment_cell_errors_not_fatal():
    bad = zoo_instance("dispmin", 10, seed=11)  # infeasible: max > n budgets fine; force algo error
    cfg = ExperimentConfig(
        functions=[("tiny", zoo_instance("faclocation", 3, seed=1)), ("ok", bad)],
        algorithm="distributed-greedy",
        mode="pm",
        budgets=(0.9,),
        repetitions=1,
        seed=0,
    )
    records = run_experiment(cfg)
    assert len(records) == 2  # every cell reported, error or not


def test_speedup_ratios_pairing():
    records = run_experiment(_small_cfg())
    ratios = speedup_ratios(records)
    assert len(ratios) == 4  # functions x budgets
    assert all(r > 0 for r in ratios.values())
