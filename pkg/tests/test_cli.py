"""CLI surface: subcommands, spec grammar, exit codes, report files."""

import json

import numpy as np
import pytest

from submemo.bench.cli import cli_main, load_function_spec
from submemo.bench.dataio import save_dense_matrix, save_set_system
from submemo.core import InputError
from submemo.functions import (
    FacilityLocationData,
    GraphCutData,
    SetCoverData,
)


def test_load_function_spec_synthetic():
    name, data = load_function_spec("synthetic:faclocation,n=25,seed=7")
    assert name == "faclocation-n25"
    assert isinstance(data, FacilityLocationData)
    assert data.n == 25


def test_load_function_spec_files(tmp_path):
    dense = tmp_path / "sim.csv"
    save_dense_matrix(dense, np.array([[0.0, 1.0], [1.0, 0.0]]))
    name, data = load_function_spec(f"graphcut:{dense}")
    assert isinstance(data, GraphCutData)
    _, default = load_function_spec(str(dense))
    assert isinstance(default, FacilityLocationData)  # bare dense CSV default
    system = tmp_path / "sys.json"
    save_set_system(system, SetCoverData(sets=[[0], [1]], universe=2))
    _, sysdata = load_function_spec(str(system))
    assert isinstance(sysdata, SetCoverData)


def test_load_function_spec_triplets(tmp_path):
    path = tmp_path / "feat.csv"
    path.write_text("triplet n=3 buckets=2\n0,0,1.0\n1,2,2.0\n", encoding="utf-8")
    _, data = load_function_spec(str(path))
    from submemo.functions import FeatureBasedData

    assert isinstance(data, FeatureBasedData)
    assert data.n == 3


def test_load_function_spec_errors(tmp_path):
    with pytest.raises(InputError):
        load_function_spec("synthetic:nope,n=5")
    with pytest.raises(InputError):
        load_function_spec(str(tmp_path / "missing.csv"))
    dense = tmp_path / "sim.csv"
    save_dense_matrix(dense, np.eye(2))
    with pytest.raises(InputError):
        load_function_spec(f"wrongclass:{dense}")


def test_cli_bench_smoke(tmp_path, capsys):
    out = tmp_path / "runs"
    code = cli_main(
        [
            "bench",
            "--function",
            "synthetic:faclocation,n=50,seed=7",
            "--algorithm",
            "lazy-greedy",
            "--mode",
            "both",
            "--budgets",
            "0.05,0.1",
            "--reps",
            "1",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    assert (out / "report.csv").exists()
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["records"]
    for record in report["records"]:
        if record["mode"] == "pm":
            assert record["counters"]["oracle_evals"] == 0
        else:
            assert record["counters"]["gain_evals"] == 0


def test_cli_maximize_json_output(tmp_path, capsys):
    code = cli_main(
        [
            "maximize",
            "--function",
            "synthetic:setcover,n=30,seed=3",
            "--algorithm",
            "lazy-greedy",
            "--k",
            "5",
            "--out",
            str(tmp_path),
        ]
    )
    assert code == 0
    payload = json.loads((tmp_path / "result.json").read_text(encoding="utf-8"))
    assert payload["k"] == 5
    assert len(payload["selected"]) <= 5
    assert payload["counters"]["oracle_evals"] == 0


def test_cli_minimize_and_nonconvergence_exit_code(capsys):
    code = cli_main(
        [
            "minimize",
            "--function",
            "synthetic:graphcut,n=16,seed=5,lam=0.5",
            "--algorithm",
            "min-norm-point",
        ]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert "minimizer_min" in payload and "duality_gap" in payload


def test_cli_gradients_pm_vo_weights_match(capsys):
    code = cli_main(
        ["gradients", "--function", "synthetic:satcov,n=24,seed=2", "--mode", "both"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["weights_match"] is True
    pm = payload["runs"]["pm"]["subgradient_counters"]
    vo = payload["runs"]["vo"]["subgradient_counters"]
    assert pm["oracle_evals"] == 0 and pm["gain_evals"] == 24
    assert vo["gain_evals"] == 0 and vo["oracle_evals"] >= 24


def test_cli_scsc_scsk_dsmin(capsys):
    base = ["--function", "synthetic:featurebased,n=14,seed=4", "--function-g",
            "synthetic:setcover,n=14,seed=5"]
    assert cli_main(["scsc", *base, "--c-frac", "0.5"]) == 0
    assert cli_main(["scsk", *base, "--b-frac", "0.4"]) == 0
    assert cli_main(["ds-min", *base, "--variant", "mod-mod"]) == 0


def test_cli_validate(capsys):
    code = cli_main(
        ["validate", "--function", "synthetic:faclocation,n=18,seed=1", "--audit-rounds", "60"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_cli_exit_codes(tmp_path, capsys):
    assert cli_main(["maximize", "--no-such-flag"]) == 2
    assert cli_main(["nonsense-command"]) == 2
    # input error from a bad file
    bad = tmp_path / "bad.csv"
    bad.write_text("garbage", encoding="utf-8")
    assert cli_main(["maximize", "--function", str(bad)]) == 2
    # infeasible constraint is an input error
    assert (
        cli_main(["maximize", "--function", "synthetic:setcover,n=5,seed=1", "--k", "50"]) == 2
    )
