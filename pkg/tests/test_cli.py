import json

import numpy as np
import pytest

from oodlab import config_to_dict, default_config, load_results_csv
from oodlab.cli import main


@pytest.fixture()
def tiny_config_path(tmp_path):
    doc = config_to_dict(default_config())
    doc["data"].update(n_per_class=40, aux_m=100, test_n_per_class=40,
                       test_ood_m=100)
    doc["train"].update(iterations=4, batch_size=16, outlier_batch_size=16,
                        log_every=2)
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def test_train_writes_artifacts_and_exits_zero(tiny_config_path, tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["train", "--config", tiny_config_path, "--out", str(out)])
    assert code == 0
    for name in ("checkpoint.bin", "history.csv", "report.csv"):
        assert (out / name).exists()
    stdout = capsys.readouterr().out
    assert "fpr95=" in stdout and "auroc=" in stdout


def test_train_seed_flag_overrides_config(tiny_config_path, tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main(["train", "--config", tiny_config_path, "--out", str(a), "--seed", "7"]) == 0
    assert main(["train", "--config", tiny_config_path, "--out", str(b), "--seed", "7"]) == 0
    assert main(["train", "--config", tiny_config_path, "--out", str(c), "--seed", "8"]) == 0
    assert (a / "checkpoint.bin").read_bytes() == (b / "checkpoint.bin").read_bytes()
    assert (a / "checkpoint.bin").read_bytes() != (c / "checkpoint.bin").read_bytes()


def test_train_dump_mix_format(tiny_config_path, tmp_path):
    out = tmp_path / "run"
    dump = tmp_path / "mix.csv"
    code = main(["train", "--config", tiny_config_path, "--out", str(out),
                 "--dump-mix", str(dump)])
    assert code == 0
    lines = dump.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "i,j,lambda,x,y"
    assert len(lines) == 1 + 16  # one row per outlier in the first batch
    for line in lines[1:]:
        i, j, lam, x, y = line.split(",")
        int(i), int(j)
        assert 0.0 <= float(lam) <= 1.0
        float(x), float(y)


def test_eval_reuses_checkpoint(tiny_config_path, tmp_path, capsys):
    run = tmp_path / "run"
    assert main(["train", "--config", tiny_config_path, "--out", str(run)]) == 0
    out = tmp_path / "eval"
    code = main(["eval", "--checkpoint", str(run / "checkpoint.bin"),
                 "--config", tiny_config_path, "--out", str(out)])
    assert code == 0
    assert (out / "report.csv").exists() and (out / "scores.csv").exists()
    scores = (out / "scores.csv").read_text(encoding="utf-8").splitlines()
    assert scores[0] == "source,score"
    assert {line.split(",")[0] for line in scores[1:]} == {"id", "ood"}
    # the fresh eval reproduces the training run's report exactly
    assert (out / "report.csv").read_text() == (run / "report.csv").read_text()


def test_grid_command(tiny_config_path, tmp_path):
    run = tmp_path / "run"
    assert main(["train", "--config", tiny_config_path, "--out", str(run)]) == 0
    grid = tmp_path / "grid.csv"
    code = main(["grid", "--checkpoint", str(run / "checkpoint.bin"),
                 "--bounds=-8,8,-8,8", "--res", "3", "--out", str(grid)])
    assert code == 0
    lines = grid.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "x,y,score" and len(lines) == 10


def test_sweep_command(tiny_config_path, tmp_path, capsys):
    out = tmp_path / "sweep"
    code = main(["sweep", "--config", tiny_config_path,
                 "--methods", "no-aux,diversemix", "--k", "10",
                 "--seeds", "0,1", "--out", str(out)])
    assert code == 0
    rows = load_results_csv(out / "results.csv")
    assert len(rows) == 4
    assert all(r["status"] == "ok" for r in rows)
    assert capsys.readouterr().out.count("fpr95=") == 4


def test_unknown_config_key_exits_2(tmp_path, capsys):
    doc = config_to_dict(default_config())
    doc["train"]["iteratoins"] = 5  # typo must be rejected, not ignored
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code = main(["train", "--config", str(path), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "train.iteratoins" in capsys.readouterr().err


def test_invalid_json_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    code = main(["train", "--config", str(path), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "config error" in capsys.readouterr().err


def test_bad_sweep_method_exits_2(tiny_config_path, tmp_path, capsys):
    code = main(["sweep", "--config", tiny_config_path, "--methods", "telepathy",
                 "--seeds", "0", "--out", str(tmp_path / "s")])
    assert code == 2
    assert "telepathy" in capsys.readouterr().err


@pytest.mark.filterwarnings("ignore:overflow")
def test_divergent_config_exits_3(tmp_path, capsys):
    doc = config_to_dict(default_config())
    doc["data"].update(n_per_class=40, aux_m=100, test_n_per_class=40,
                       test_ood_m=100)
    doc["train"].update(iterations=50, batch_size=16, outlier_batch_size=16)
    doc["optim"]["learning_rate"] = 1e12
    path = tmp_path / "explode.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code = main(["train", "--config", str(path), "--out", str(tmp_path / "o")])
    assert code == 3
    assert "diverged" in capsys.readouterr().err


def test_missing_checkpoint_exits_1(tmp_path, capsys):
    code = main(["eval", "--checkpoint", str(tmp_path / "nope.bin"),
                 "--out", str(tmp_path / "o")])
    assert code == 1


def test_bad_bounds_exit_2(tiny_config_path, tmp_path, capsys):
    run = tmp_path / "run"
    assert main(["train", "--config", tiny_config_path, "--out", str(run)]) == 0
    code = main(["grid", "--checkpoint", str(run / "checkpoint.bin"),
                 "--bounds=-8,8,-8", "--res", "3",
                 "--out", str(tmp_path / "g.csv")])
    assert code == 2
