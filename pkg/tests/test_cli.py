import json
import subprocess
import sys

import pytest

from mstnet import __version__
from mstnet.cli import build_parser, main
from mstnet.data import load_csv
from mstnet.harness import read_report, read_tabular


@pytest.fixture
def generated(tmp_path):
    path = tmp_path / "art.csv"
    assert main(["generate", "--shapes", "spiral:2,star:1", "--n", "20", "--overlap", "0.05",
                 "--seed", "4", "--out", str(path)]) == 0
    return path


def test_generate_writes_labeled_csv(generated):
    d = load_csv(generated, "class")
    assert d.features.shape == (60, 2)
    assert d.class_counts() == {0: 20, 1: 20, 2: 20}


def test_generate_identical_outputs(tmp_path, generated):
    other = tmp_path / "again.csv"
    main(["generate", "--shapes", "spiral:2,star:1", "--n", "20", "--overlap", "0.05",
          "--seed", "4", "--out", str(other)])
    assert other.read_bytes() == generated.read_bytes()


def test_fit_predict(tmp_path, generated, capsys):
    model = tmp_path / "model.json"
    preds = tmp_path / "preds.csv"
    assert main(["fit", "--data", str(generated), "--label-col", "class", "--theta", "0.8",
                 "--out", str(model)]) == 0
    stored = json.loads(model.read_text())
    assert stored["version"] == 1 and stored["theta"] == 0.8
    assert main(["predict", "--model", str(model), "--data", str(generated), "--out", str(preds)]) == 0
    lines = preds.read_text().splitlines()
    assert lines[0] == "row,label,delta_0,delta_1,delta_2"
    assert len(lines) == 61
    assert "accuracy" in capsys.readouterr().out


def test_cv_tabular_ten_rows(tmp_path, generated):
    out = tmp_path / "report.csv"
    assert main(["cv", "--data", str(generated), "--k", "10", "--optimizer", "none", "--out", str(out)]) == 0
    rows = read_tabular(out)
    assert len(rows) == 10
    assert {r["config"] for r in rows} == {"Proposal"}


def test_cv_defaults_echoed(tmp_path, generated, capsys):
    out = tmp_path / "report.json"
    assert main(["cv", "--data", str(generated), "--out", str(out)]) == 0
    echo = json.loads(capsys.readouterr().out.splitlines()[0])
    assert echo["theta"] == 0.8 and echo["k"] == 10
    assert read_report(out).config["k"] == 10


def test_cv_generated_data_and_ga(tmp_path, capsys):
    cfg = tmp_path / "ga.cfg"
    cfg.write_text("population_size = 6\ngenerations = 1\n")
    out = tmp_path / "r.json"
    assert main(["cv", "--shapes", "spiral:2", "--n", "15", "--k", "3", "--optimizer", "ga",
                 "--ga-config", str(cfg), "--out", str(out)]) == 0
    report = read_report(out)
    assert report.configs == ["PropOpt"]
    assert all(r.optimizer["evaluations"] <= 12 for r in report.folds)


def test_optimize_and_report(tmp_path, generated, capsys):
    cfg = tmp_path / "ga.cfg"
    cfg.write_text("population_size = 6\ngenerations = 2\nseed = 3\n")
    result = tmp_path / "result.json"
    assert main(["optimize", "--data", str(generated), "--ga-config", str(cfg), "--out", str(result)]) == 0
    r = json.loads(result.read_text())
    assert r["best_fitness"] >= r["baseline_fitness"]
    assert len(r["history"]) == r["evaluations"]

    base, opt = tmp_path / "b.json", tmp_path / "o.json"
    main(["cv", "--data", str(generated), "--k", "3", "--out", str(base)])
    main(["cv", "--data", str(generated), "--k", "3", "--optimizer", "grid", "--grid-values", "0.5,1",
          "--out", str(opt)])
    capsys.readouterr()
    assert main(["report", "--input", str(base), "--compare", str(opt)]) == 0
    assert "mean improvement" in capsys.readouterr().out
    assert main(["report", "--input", str(base), "--format", "tabular", "--out", str(tmp_path / "t.csv")]) == 0
    assert len(read_tabular(tmp_path / "t.csv")) == 3
    assert main(["report", "--input", str(base)]) == 0
    assert "Proposal accuracy" in capsys.readouterr().out


def test_single_class_fit_fails_with_exit_1(tmp_path, capsys):
    p = tmp_path / "one.csv"
    p.write_text("a,b,class\n1,2,0\n3,4,0\n5,6,0\n")
    assert main(["fit", "--data", str(p), "--out", str(tmp_path / "m.json")]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and "at least 2 classes" in err[0]


def test_missing_file_exit_1(tmp_path, capsys):
    assert main(["fit", "--data", str(tmp_path / "nope.csv"), "--out", "m.json"]) == 1
    assert "no such file" in capsys.readouterr().err


def test_usage_errors_exit_2(capsys):
    assert main(["cv", "--data", "x.csv", "--out", "r.json", "--bogus"]) == 2
    assert main(["frobnicate"]) == 2
    assert main([]) == 2


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == f"mstnet {__version__}"


def test_every_subcommand_and_flag_has_help():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    assert set(sub.choices) == {"generate", "fit", "predict", "cv", "optimize", "report"}
    for name, p in sub.choices.items():
        for action in p._actions:
            assert action.help, f"{name} {action.option_strings} has no help"


def test_env_seed(monkeypatch, tmp_path):
    monkeypatch.setenv("MSTNET_SEED", "17")
    args = build_parser().parse_args(["generate", "--out", "x.csv"])
    assert args.seed == 17


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "mstnet", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
