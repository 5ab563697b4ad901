import dataclasses

import numpy as np
import pytest

from mstnet.data import DataError, generate_artificial, generate_noise_fixture
from mstnet.harness import (
    BASELINE_LABEL,
    OPTIMIZED_LABEL,
    REFERENCE_LABEL,
    ExperimentConfig,
    aggregate,
    compare,
    emit_report,
    read_report,
    read_tabular,
    run_cv,
    summarize,
)
from mstnet.optimizer import GAConfig, GridConfig

TINY_GA = GAConfig(population_size=6, generations=2)


@pytest.fixture(scope="module")
def spirals():
    return generate_artificial(["spiral:2:30", "star:1:30"], 0.05, 3)


@pytest.fixture(scope="module")
def baseline_report(spirals):
    return run_cv(ExperimentConfig(k=5, seed=1, reference=True), spirals)


@pytest.fixture(scope="module")
def ga_report(spirals):
    return run_cv(ExperimentConfig(k=5, seed=1, optimizer="ga", ga=TINY_GA), spirals)


def strip_times(rows):
    return [{k: v for k, v in r.items() if k != "wall_time_s"} for r in rows]


def test_fold_count_and_test_sizes():
    d = generate_artificial(["spiral:4:70", "star:3:70"], 0.1, 0)
    report = run_cv(ExperimentConfig(k=10, seed=2), d)
    recs = report.records(BASELINE_LABEL)
    assert len(recs) == 10
    # 490 samples, 7 classes of 70 -> 7 per class per fold
    assert all(len(r.test_rows) == 49 for r in recs)


def test_labels(baseline_report, ga_report):
    assert baseline_report.configs == [BASELINE_LABEL, REFERENCE_LABEL]
    assert ga_report.configs == [OPTIMIZED_LABEL]


def test_one_record_per_fold_per_config(baseline_report):
    for name in baseline_report.configs:
        assert [r.fold for r in baseline_report.records(name)] == list(range(5))


def test_aggregates_recomputable(baseline_report):
    again = aggregate(baseline_report.folds)
    for name, metrics in baseline_report.aggregates.items():
        for metric, stats in metrics.items():
            values = [getattr(r, metric) for r in baseline_report.records(name)]
            assert stats["mean"] == pytest.approx(np.mean(values), abs=1e-12)
            assert stats["median"] == pytest.approx(np.median(values), abs=1e-12)
            assert stats == again[name][metric]


def test_summarize():
    s = summarize([1.0, 2.0, 4.0])
    assert s == {"mean": 7 / 3, "median": 2.0, "min": 1.0, "max": 4.0, "std": pytest.approx(np.std([1, 2, 4]))}


def test_fold_isolation_with_oversampling(baseline_report, spirals):
    for r in baseline_report.folds:
        assert not set(r.train_rows) & set(r.test_rows)
    covered = sorted(i for r in baseline_report.records(BASELINE_LABEL) for i in r.test_rows)
    assert covered == list(range(len(spirals)))


def test_optimizer_validation_rows_come_from_training(ga_report):
    for r in ga_report.folds:
        assert set(r.optimizer["validation_rows"]) <= set(r.train_rows)
        assert not set(r.optimizer["validation_rows"]) & set(r.test_rows)


def test_optimizer_dominates_uniform_on_validation(ga_report):
    for r in ga_report.folds:
        assert r.optimizer["best_fitness"] >= r.optimizer["baseline_fitness"]
        assert r.optimizer["evaluations"] <= TINY_GA.max_evaluations


def test_seed_reproducible(spirals, tmp_path, ga_report):
    again = run_cv(ExperimentConfig(k=5, seed=1, optimizer="ga", ga=TINY_GA), spirals)
    emit_report(ga_report, tmp_path / "a.csv", "tabular")
    emit_report(again, tmp_path / "b.csv", "tabular")
    assert strip_times(read_tabular(tmp_path / "a.csv")) == strip_times(read_tabular(tmp_path / "b.csv"))


def test_parallel_folds_match_sequential(spirals):
    cfg = ExperimentConfig(k=4, seed=3)
    seq = run_cv(cfg, spirals, n_jobs=1)
    par = run_cv(cfg, spirals, n_jobs=2)
    assert [(r.fold, r.accuracy, r.test_rows) for r in seq.folds] == \
        [(r.fold, r.accuracy, r.test_rows) for r in par.folds]


def test_grid_optimizer_runs(spirals):
    cfg = ExperimentConfig(k=3, seed=0, optimizer="grid", grid=GridConfig((0.5, 1.0)))
    report = run_cv(cfg, spirals)
    assert all(r.optimizer["evaluations"] == 4 for r in report.folds)


def test_config_validation():
    with pytest.raises(DataError):
        ExperimentConfig(k=1)
    with pytest.raises(DataError):
        ExperimentConfig(theta=0.0)
    with pytest.raises(DataError):
        ExperimentConfig(optimizer="pso")


def test_config_defaults():
    cfg = ExperimentConfig()
    assert cfg.theta == 0.8 and cfg.k == 10


def test_config_round_trip():
    cfg = ExperimentConfig(shapes=("spiral:2:10",), optimizer="grid", grid=GridConfig((0.5, 1.0), 3))
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_class_smaller_than_k_is_an_error(spirals):
    with pytest.raises(DataError):
        run_cv(ExperimentConfig(k=40), spirals)


def test_config_loads_generated_data():
    report = run_cv(ExperimentConfig(shapes=("spiral:2:20",), k=4, seed=5))
    assert report.classes == [0, 1]


# ------------------------------------------------------------------ compare


def test_compare_identical_reports(baseline_report):
    c = compare(baseline_report, baseline_report)
    assert c["per_fold"] == [0.0] * 5
    assert c["mean_improvement_points"] == 0.0


def test_compare_constant_improvement(baseline_report):
    better = read_report_copy(baseline_report)
    for r in better.folds:
        r.accuracy += 0.05
    c = compare(baseline_report, better)
    assert c["mean_improvement_points"] == pytest.approx(5.0)
    assert c["per_fold"] == pytest.approx([0.05] * 5)


def test_compare_rejects_mismatched_folds(baseline_report, spirals):
    other = run_cv(ExperimentConfig(k=5, seed=99), spirals)
    with pytest.raises(DataError):
        compare(baseline_report, other)


def read_report_copy(report):
    from mstnet.harness import ExperimentReport

    return ExperimentReport.from_dict(report.to_dict())


# ------------------------------------------------------------------ emitting


def test_tabular_rows_and_header(baseline_report, tmp_path):
    emit_report(baseline_report, tmp_path / "r.csv", "tabular")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0].split(",") == ["fold", "config", "accuracy", "macro_precision", "wall_time_s",
                                   "precision_0", "precision_1", "precision_2"]
    assert len(lines) == 1 + 5 * 2


def test_ten_folds_two_configs_gives_twenty_rows(tmp_path):
    d = generate_artificial(["spiral:2:20"], 0.05, 1)
    report = run_cv(ExperimentConfig(k=10, reference=True), d)
    emit_report(report, tmp_path / "r.csv", "tabular")
    assert len(read_tabular(tmp_path / "r.csv")) == 20


def test_structured_round_trip(baseline_report, tmp_path):
    emit_report(baseline_report, tmp_path / "r.json", "structured")
    back = read_report(tmp_path / "r.json")
    assert back.aggregates == baseline_report.aggregates
    assert back.to_dict() == baseline_report.to_dict()
    assert back.folds[0].per_class_precision.keys() == baseline_report.folds[0].per_class_precision.keys()


def test_tabular_values_round_trip(baseline_report, tmp_path):
    emit_report(baseline_report, tmp_path / "r.csv", "tabular")
    rows = read_tabular(tmp_path / "r.csv")
    for row, rec in zip(rows, baseline_report.folds):
        assert float(row["accuracy"]) == rec.accuracy
        assert float(row["macro_precision"]) == rec.macro_precision


def test_emit_unwritable_path(baseline_report, tmp_path):
    with pytest.raises(DataError):
        emit_report(baseline_report, tmp_path / "missing" / "r.json")


def test_report_schema_version_checked(baseline_report):
    from mstnet.harness import ExperimentReport

    d = baseline_report.to_dict()
    d["schema_version"] = 7
    with pytest.raises(DataError):
        ExperimentReport.from_dict(d)


def test_report_string_labels(tmp_path):
    d = generate_noise_fixture(20, 0.1, 0)
    d.labels = np.where(d.labels == 0, "neg", "pos")
    report = run_cv(dataclasses.replace(ExperimentConfig(k=4), scale=False), d)
    emit_report(report, tmp_path / "r.json")
    back = read_report(tmp_path / "r.json")
    assert back.classes == ["neg", "pos"]
    assert set(back.folds[0].confusion) == {"neg", "pos"}
