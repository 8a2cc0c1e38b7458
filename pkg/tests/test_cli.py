import csv
import io
import json

import numpy as np
import pytest

from paretoflow.cli import main
from paretoflow.config import ExperimentConfig


def write_points(path, rows, header=("id", "f0", "f1")):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return str(path)


@pytest.fixture
def dilemma_csv(tmp_path):
    return write_points(tmp_path / "pts.csv", [[1, 1, 1], [2, 2, 1.2], [3, 3, 1.4], [4, 1.5, 2]])


def test_rank(dilemma_csv, tmp_path):
    out = tmp_path / "r.csv"
    assert main(["rank", "--points", dilemma_csv, "--method", "gr", "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out)))
    assert [r["id"] for r in rows] == ["1", "2", "3", "4"]
    scores = {r["id"]: float(r["score"]) for r in rows}
    assert scores["3"] == scores["4"] > scores["2"] > scores["1"]


def test_rank_cheap_and_nn(dilemma_csv, capsys):
    assert main(["rank", "--points", dilemma_csv, "--method", "cheap"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [float(r["score"]) for r in rows] == [0.0, 0.0, 1.0, 1.0]
    assert main(["rank", "--points", dilemma_csv, "--method", "nn"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 5


def test_metrics_json_and_csv(tmp_path, capsys):
    ref = write_points(tmp_path / "ref.csv", [[0, 0, 1], [1, 1, 0]])
    assert main(["metrics", "--candidates", ref, "--reference", ref, "--ref-point", "0", "0"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["igd_plus"] == 0.0 and rep["coverage"] == 1.0
    assert main(["metrics", "--points", ref, "--reference", ref, "--csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2 and "hv" in lines[0]


def test_check_consistency(dilemma_csv, tmp_path, capsys):
    subs = tmp_path / "s.json"
    subs.write_text(json.dumps([[2, 4], [2, 3], [3, 4]]))
    assert main(["check-consistency", "--points", dilemma_csv, "--subsets", str(subs)]) == 0
    assert capsys.readouterr().out.startswith("infeasible")
    subs.write_text(json.dumps({"subsets": [[3, 4]]}))
    assert main(["check-consistency", "--points", dilemma_csv, "--subsets", str(subs), "--json"]) == 0
    v = json.loads(capsys.readouterr().out)
    assert v["feasible"] and v["witness"]["3"] == v["witness"]["4"] > 0


def test_enumerate(dilemma_csv, tmp_path):
    out = tmp_path / "fams.json"
    assert main(["enumerate", "--points", dilemma_csv, "--out", str(out)]) == 0
    assert json.loads(out.read_text()) == [{"subsets": [[2, 3], [2, 4]]}]


def test_train_and_compare(tmp_path, capsys):
    cfg = ExperimentConfig.from_dict(
        {
            "env": {"env": "hypergrid", "H": 5},
            "methods": ["gr", "nn"],
            "seeds": [0],
            "train": {"steps": 3, "batch_size": 8, "hidden": [8]},
            "n_candidates": 16,
        }
    )
    path = tmp_path / "c.toml"
    cfg.save(path)
    run = tmp_path / "run"
    assert main(["train", "--config", str(path), "--out", str(run)]) == 0
    assert (run / "results.csv").exists()
    capsys.readouterr()
    assert main(["compare", "--run", str(run)]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert {r["method"] for r in rows} == {"gr", "nn"}


def test_train_failure_exit_code(tmp_path):
    path = tmp_path / "bad.toml"
    ExperimentConfig.from_dict(
        {"env": {"env": "hypergrid", "H": 4, "objectives": ["nope", "currin"]}, "seeds": [0], "train": {"steps": 1}}
    ).save(path)
    assert main(["train", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


def test_heatmap(tmp_path):
    assert main(["heatmap", "--reward", "identity", "--grid", "8", "--out", str(tmp_path)]) == 0
    for m in ["gr", "nn"]:
        assert np.loadtxt(tmp_path / f"identity_{m}.csv", delimiter=",").shape == (8, 8)


def test_compare_fronts_files(tmp_path, capsys):
    a = write_points(tmp_path / "a.csv", [[0, 0, 1], [1, 1, 0]])
    b = write_points(tmp_path / "b.csv", [[0, 0.5, 0.5]])
    assert main(["compare", "--fronts", f"a={a}", f"b={b}"]) == 0
    assert "a,2" in capsys.readouterr().out


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["rank", "--points", str(tmp_path / "missing.csv")]) == 1
    assert "error" in capsys.readouterr().err
    assert main(["train", "--config", str(tmp_path / "missing.toml")]) == 1
    with pytest.raises(SystemExit):
        main(["rank"])
