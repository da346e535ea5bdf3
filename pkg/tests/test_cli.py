import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from granular_tsvm import schemas
from granular_tsvm.cli import main

DATA = resources.files("granular_tsvm.data")
CROSS = str(DATA / "toy_crossplane.csv")
LINEAR = str(DATA / "toy_linear.csv")
CHECKER = str(DATA / "toy_checkerboard.csv")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if code == 0 else None), out.err


def validate(name, obj):
    jsonschema.validate(obj, schemas.load(name))


@pytest.fixture
def linear_model(tmp_path, capsys):
    path = tmp_path / "model.json"
    code, _, _ = run(capsys, "train", LINEAR, "-o", path, "--min-balls", 6)
    assert code == 0
    return path


def test_granulate(tmp_path, capsys):
    balls = tmp_path / "balls.json"
    code, out, _ = run(capsys, "granulate", CROSS, "--purity", 0.9, "-o", balls)
    assert code == 0
    validate("granulate", out)
    validate("balls", json.loads(balls.read_text()))
    assert sum(b["count"] for b in out["balls"]) == 130


def test_granulate_plot(tmp_path, capsys):
    pytest.importorskip("matplotlib")
    png = tmp_path / "balls.png"
    code, _, _ = run(capsys, "granulate", CROSS, "--plot", png)
    assert code == 0 and png.stat().st_size > 0


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "granulate", tmp_path / "missing.csv")[0] == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,a\n3,b\n")
    assert run(capsys, "granulate", bad)[0] == 1
    single = tmp_path / "single.csv"
    single.write_text("0,1,a\n1,0,a\n2,2,a\n")
    assert run(capsys, "granulate", single)[0] == 2
    assert run(capsys, "granulate", CHECKER, "--max-iterations", 1)[0] == 3
    assert run(capsys, "train", CHECKER, "-o", tmp_path / "m.json", "--max-sweeps", 1,
               "--tolerance", 1e-14)[0] == 4
    assert run(capsys, "train", CHECKER, "-o", tmp_path / "m.json", "--purity", 0.3)[0] == 5
    with pytest.raises(SystemExit) as info:
        main(["granulate"])
    assert info.value.code == 5


@pytest.mark.parametrize("model,kernel", [("gbtsvm", "linear"), ("gbtsvm", "gaussian"),
                                          ("lsgbtsvm", "linear"), ("lsgbtsvm", "gaussian")])
def test_train_runs(model, kernel, tmp_path, capsys):
    path = tmp_path / "m.json"
    code, out, _ = run(capsys, "train", CHECKER, "-o", path, "--model", model, "--kernel",
                       kernel, "--sigma", 0.1, "--purity", 0.9)
    assert code == 0
    validate("train", out)
    validate("model", json.loads(path.read_text()))


@pytest.mark.parametrize("model", ["gbtsvm", "lsgbtsvm"])
def test_predict_round_trip_on_crossplane(model, tmp_path, capsys):
    path = tmp_path / "m.json"
    code, _, _ = run(capsys, "train", CROSS, "-o", path, "--model", model,
                     *[a for k in ("d1", "d2", "d3", "d4") for a in (f"--{k}", 0.01)])
    assert code == 0
    fresh = tmp_path / "fresh.csv"
    assert run(capsys, "synth", "--kind", "crossplane", "--n", 130, "--seed", 2, "-o", fresh)[0] == 0
    data = np.loadtxt(fresh, delimiter=",")
    feats = tmp_path / "x.csv"
    np.savetxt(feats, data[:, :-1], delimiter=",")
    code, out, _ = run(capsys, "predict", path, feats, "-o", tmp_path / "pred.csv")
    assert code == 0
    validate("predict", out)
    pred = np.array(out["predictions"], dtype=float)
    assert np.mean(pred == data[:, -1]) >= 0.95
    code, out, _ = run(capsys, "eval", path, fresh)
    validate("eval", out)
    assert out["accuracy"] >= 95


def test_normalized_model_applies_scaling(tmp_path, capsys):
    model = tmp_path / "m.json"
    assert run(capsys, "train", LINEAR, "-o", model, "--normalize", "--min-balls", 6)[0] == 0
    assert "normalization" in json.loads(model.read_text())
    code, out, _ = run(capsys, "eval", model, LINEAR)
    assert code == 0 and out["accuracy"] >= 90


def test_vtub(linear_model, tmp_path, capsys):
    balls = tmp_path / "balls.json"
    run(capsys, "granulate", LINEAR, "--min-balls", 6, "-o", balls)
    code, out, err = run(capsys, "vtub", linear_model, balls, "--pairs")
    assert code == 0
    validate("vtub", out)
    assert out["n_violations"] == 0
    assert "violations" in err


def test_vtub_on_kernel_model(tmp_path, capsys):
    model, balls = tmp_path / "k.json", tmp_path / "b.json"
    run(capsys, "train", LINEAR, "-o", model, "--kernel", "gaussian")
    run(capsys, "granulate", LINEAR, "-o", balls)
    assert run(capsys, "vtub", model, balls)[0] == 5


def test_stats_published(capsys):
    code, out, _ = run(capsys, "stats", "--published")
    assert code == 0
    validate("stats", out)
    assert out["wtl"]["GBTSVM vs TSVM"]["win"] == 36
    assert out["wtl_threshold"] == pytest.approx(23.88, abs=0.01)


def test_stats_from_csv(tmp_path, capsys):
    p = tmp_path / "acc.csv"
    p.write_text("dataset,A,B,C\nx,90,80,70\ny,60,75,70\nz,50,50,40\n")
    code, out, _ = run(capsys, "stats", p)
    assert code == 0
    validate("stats", out)
    assert run(capsys, "stats")[0] == 5


def test_synth_and_noise(tmp_path, capsys):
    data = tmp_path / "s.csv"
    code, out, _ = run(capsys, "synth", "--kind", "crossplane", "--n", 50, "-o", data)
    assert code == 0
    validate("synth", out)
    code, out, _ = run(capsys, "noise", data, "--rate", 0.2, "--seed", 3, "-o", tmp_path / "n.csv")
    assert code == 0
    validate("noise", out)
    assert len(out["flipped"]) == 10


def test_benchmark(tmp_path, capsys):
    table = tmp_path / "acc.csv"
    code, out, _ = run(capsys, "benchmark", CROSS, LINEAR, "--models", "gbtsvm", "tsvm",
                       "--d-grid", 0.1, 10, "--folds", 3, "--noise", 0, 0.1,
                       "--output-csv", table)
    assert code == 0
    validate("benchmark", out)
    assert len(out["rows"]) == 2 * 2 * 2
    assert set(out["stats"]) == {"0.0", "0.1"}
    assert table.read_text().startswith("dataset,noise,model")


def test_identical_runs_are_byte_identical(tmp_path):
    cmd = [sys.executable, "-m", "granular_tsvm.cli", "benchmark", CROSS, LINEAR,
           "--models", "gbtsvm", "lsgbtsvm", "--d-grid", "0.1", "10", "--folds", "3",
           "--noise", "0.1"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd + ["--jobs", "2"], capture_output=True, check=True).stdout
    assert a == b and a


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit):
        main(["train", "--help"])
    assert "default 1.0" in capsys.readouterr().out
