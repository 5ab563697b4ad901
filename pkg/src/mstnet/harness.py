"""Cross-validated experiments, paired comparisons and report files."""

from __future__ import annotations

import csv
import dataclasses
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .classifier import evaluate, fit, nearest_neighbor_predict, predict_batch
from .data import (
    Dataset,
    DataError,
    generate_artificial,
    load_csv,
    random_oversample,
    stratified_holdout,
    stratified_kfold,
)
from .graph import DEFAULT_THETA, FeatureWeights
from .optimizer import GAConfig, GridConfig, fitness, ga_optimize, grid_search

SCHEMA_VERSION = 1
BASELINE_LABEL = "Proposal"
OPTIMIZED_LABEL = "PropOpt"
REFERENCE_LABEL = "1NN"


@dataclass(frozen=True)
class ExperimentConfig:
    """One cross-validation experiment.

    The dataset comes from ``data`` (CSV path) or, if that is empty, from
    the artificial generator with ``shapes``/``overlap``.
    """

    data: str | None = None
    label_col: str | None = None
    shapes: tuple = ()
    overlap: float = 0.0
    theta: float = DEFAULT_THETA
    k: int = 10
    seed: int = 0
    optimizer: str = "none"
    grid: GridConfig = field(default_factory=GridConfig)
    ga: GAConfig = field(default_factory=GAConfig)
    holdout: float = 0.2
    oversample: bool = True
    scale: bool = True
    reference: bool = False

    def __post_init__(self):
        if self.k < 2:
            raise DataError("k must be at least 2")
        if not self.theta > 0:
            raise DataError("theta must be positive")
        if self.optimizer not in ("none", "grid", "ga"):
            raise DataError(f"unknown optimizer {self.optimizer!r}")
        if not 0 < self.holdout < 1:
            raise DataError("holdout fraction must be in (0, 1)")
        object.__setattr__(self, "shapes", tuple(self.shapes))

    @property
    def label(self) -> str:
        return BASELINE_LABEL if self.optimizer == "none" else OPTIMIZED_LABEL

    def load(self) -> Dataset:
        if self.data:
            return load_csv(self.data, self.label_col)
        if not self.shapes:
            raise DataError("config names neither a data file nor generator shapes")
        return generate_artificial(self.shapes, self.overlap, self.seed)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["grid"]["grid_values"] = list(d["grid"]["grid_values"])
        d["shapes"] = list(self.shapes)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["grid"] = GridConfig(**{**d.get("grid", {}), "grid_values": tuple(d.get("grid", {}).get("grid_values", GridConfig().grid_values))})
        d["ga"] = GAConfig(**d.get("ga", {}))
        return cls(**d)


@dataclass
class FoldRecord:
    fold: int
    config: str
    accuracy: float
    macro_precision: float
    per_class_precision: dict
    confusion: dict
    wall_time: dict
    train_rows: list = field(default_factory=list)
    test_rows: list = field(default_factory=list)
    optimizer: dict | None = None

    @property
    def wall_time_s(self) -> float:
        return float(sum(self.wall_time.values()))


@dataclass
class ExperimentReport:
    config: dict
    classes: list
    folds: list
    aggregates: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)

    @property
    def configs(self) -> list[str]:
        seen = []
        for r in self.folds:
            if r.config not in seen:
                seen.append(r.config)
        return seen

    def records(self, config: str) -> list[FoldRecord]:
        return sorted((r for r in self.folds if r.config == config), key=lambda r: r.fold)

    def to_dict(self) -> dict:
        return {
            "schema": "mstnet.report",
            "schema_version": SCHEMA_VERSION,
            "versions": self.versions,
            "config": self.config,
            "classes": self.classes,
            "aggregates": self.aggregates,
            "folds": [_record_to_dict(r) for r in self.folds],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        if d.get("schema") != "mstnet.report" or d.get("schema_version") != SCHEMA_VERSION:
            raise DataError("not a report file of a supported schema version")
        classes = d["classes"]
        folds = [_record_from_dict(r, classes) for r in d["folds"]]
        return cls(d["config"], classes, folds, d["aggregates"], d["versions"])


def _keyed(mapping: dict, classes: list) -> dict:
    # JSON object keys are strings; map them back onto the class labels
    lookup = {str(c): c for c in classes}
    return {lookup.get(k, k): v for k, v in mapping.items()}


def _record_to_dict(r: FoldRecord) -> dict:
    d = dataclasses.asdict(r)
    d["per_class_precision"] = {str(k): v for k, v in r.per_class_precision.items()}
    d["confusion"] = {str(t): {str(p): n for p, n in row.items()} for t, row in r.confusion.items()}
    return d


def _record_from_dict(d: dict, classes: list) -> FoldRecord:
    d = dict(d)
    d["per_class_precision"] = _keyed(d["per_class_precision"], classes)
    d["confusion"] = {t: _keyed(row, classes) for t, row in _keyed(d["confusion"], classes).items()}
    return FoldRecord(**d)


def summarize(values) -> dict:
    """mean, median, min, max and population standard deviation."""
    v = np.asarray(values, dtype=float)
    return {
        "mean": float(np.mean(v)),
        "median": float(np.median(v)),
        "min": float(np.min(v)),
        "max": float(np.max(v)),
        "std": float(np.std(v)),
    }


def aggregate(folds: list[FoldRecord]) -> dict:
    out = {}
    for name in dict.fromkeys(r.config for r in folds):
        recs = [r for r in folds if r.config == name]
        out[name] = {
            "accuracy": summarize([r.accuracy for r in recs]),
            "macro_precision": summarize([r.macro_precision for r in recs]),
        }
    return out


def _fold_seed(seed: int, fold: int) -> int:
    return int(np.random.SeedSequence([seed, fold]).generate_state(1)[0])


def _optimize(config: ExperimentConfig, train: Dataset, seed: int) -> tuple[FeatureWeights, dict]:
    keep, hold = stratified_holdout(train, config.holdout, seed)
    inner, validation = train.subset(keep), train.subset(hold)
    if config.oversample:
        inner = random_oversample(inner, seed)
    baseline = fitness(FeatureWeights.uniform(train.n_features), inner, validation,
                       config.theta, config.scale)
    if config.optimizer == "grid":
        result = grid_search(config.grid, inner, validation, config.theta, config.scale)
    else:
        ga = dataclasses.replace(config.ga, seed=seed)
        result = ga_optimize(ga, inner, validation, config.theta, config.scale)
    info = result.to_dict()
    info["baseline_fitness"] = baseline
    info["validation_rows"] = validation.rows.tolist()
    return result.best_weights, info


def _run_fold(config: ExperimentConfig, data: Dataset, train_idx, test_idx, fold: int) -> list[FoldRecord]:
    seed = _fold_seed(config.seed, fold)
    classes = data.classes
    train, test = data.subset(train_idx), data.subset(test_idx)
    times = {}
    records = []

    weights, opt_info = FeatureWeights.uniform(data.n_features), None
    if config.optimizer != "none":
        t0 = time.perf_counter()
        weights, opt_info = _optimize(config, train, seed)
        times["optimize"] = time.perf_counter() - t0

    if config.oversample:
        train = random_oversample(train, seed)
    t0 = time.perf_counter()
    model = fit(train, weights, config.theta, scale=config.scale)
    times["build"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    preds = predict_batch(model, test)
    times["predict"] = time.perf_counter() - t0

    m = evaluate(preds, test.labels, classes=classes)
    records.append(FoldRecord(
        fold, config.label, m.accuracy, m.macro_precision, m.per_class_precision,
        m.confusion, times, train.rows.tolist(), test.rows.tolist(), opt_info,
    ))

    if config.reference:
        t0 = time.perf_counter()
        ref = nearest_neighbor_predict(train, test, scale=config.scale)
        rt = {"predict": time.perf_counter() - t0}
        m = evaluate(ref, test.labels, classes=classes)
        records.append(FoldRecord(
            fold, REFERENCE_LABEL, m.accuracy, m.macro_precision, m.per_class_precision,
            m.confusion, rt, train.rows.tolist(), test.rows.tolist(),
        ))
    return records


def run_cv(config: ExperimentConfig, data: Dataset | None = None, n_jobs: int = 1) -> ExperimentReport:
    """Stratified k-fold evaluation of the classifier.

    Per fold the training portion is (optionally) oversampled, feature
    weights are optionally optimized on a stratified holdout carved from
    it, the model is fitted and the held-out fold is scored. ``n_jobs``
    > 1 runs folds in worker processes; ``0`` uses every CPU. Results do
    not depend on ``n_jobs``.
    """
    if data is None:
        data = config.load()
    folds = stratified_kfold(data, config.k, config.seed)
    jobs = [(config, data, folds.train_index(f), folds.test_index(f), f) for f in range(config.k)]
    if n_jobs == 0:
        n_jobs = os.cpu_count() or 1
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_run_fold, *zip(*jobs)))
    else:
        results = [_run_fold(*job) for job in jobs]

    records = [r for fold_records in results for r in fold_records]
    order = {name: i for i, name in enumerate(dict.fromkeys(r.config for r in records))}
    records.sort(key=lambda r: (order[r.config], r.fold))
    return ExperimentReport(
        config.to_dict(),
        [_plain(c) for c in data.classes],
        records,
        aggregate(records),
        {"mstnet": __version__, "numpy": np.__version__, "schema_version": SCHEMA_VERSION},
    )


def _plain(v):
    return v.item() if isinstance(v, np.generic) else v


def compare(baseline: ExperimentReport, optimized: ExperimentReport,
            metric: str = "accuracy", baseline_config: str | None = None,
            optimized_config: str | None = None) -> dict:
    """Paired per-fold differences ``optimized - baseline``.

    Improvements are also given in percentage points (difference * 100).
    """
    b_name = baseline_config or baseline.configs[0]
    o_name = optimized_config or optimized.configs[0]
    b, o = baseline.records(b_name), optimized.records(o_name)
    if [r.fold for r in b] != [r.fold for r in o]:
        raise DataError("reports have different fold structures")
    for rb, ro in zip(b, o):
        if sorted(rb.test_rows) != sorted(ro.test_rows):
            raise DataError(f"fold {rb.fold} holds out different rows in the two reports")
    deltas = [getattr(ro, metric) - getattr(rb, metric) for rb, ro in zip(b, o)]
    return {
        "metric": metric,
        "baseline": b_name,
        "optimized": o_name,
        "per_fold": deltas,
        "mean_delta": float(np.mean(deltas)),
        "median_delta": float(np.median(deltas)),
        "mean_improvement_points": float(np.mean(deltas) * 100),
        "median_improvement_points": float(np.median(deltas) * 100),
    }


TABULAR_COLUMNS = ["fold", "config", "accuracy", "macro_precision", "wall_time_s"]


def tabular_rows(report: ExperimentReport) -> list[list]:
    header = TABULAR_COLUMNS + [f"precision_{c}" for c in report.classes]
    rows = [header]
    for r in report.folds:
        rows.append([r.fold, r.config, repr(r.accuracy), repr(r.macro_precision),
                     repr(r.wall_time_s)]
                    + [repr(float(r.per_class_precision.get(c, 0.0))) for c in report.classes])
    return rows


def emit_report(report: ExperimentReport, path, format: str = "structured") -> None:
    """Write ``report`` as JSON (``structured``) or CSV (``tabular``).

    Floats are written with ``repr``, the shortest text that parses back to
    the same double, so both formats round-trip exactly.
    """
    path = Path(path)
    try:
        if format == "structured":
            path.write_text(json.dumps(report.to_dict(), indent=1) + "\n", encoding="utf-8")
        elif format == "tabular":
            with path.open("w", newline="", encoding="utf-8") as fh:
                csv.writer(fh).writerows(tabular_rows(report))
        else:
            raise ValueError(f"unknown report format {format!r}")
    except OSError as exc:
        raise DataError(f"cannot write report to {path}: {exc.strerror}") from None


def read_report(path) -> ExperimentReport:
    return ExperimentReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def read_tabular(path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
