"""Command-line interface for the mstnet classifier.

Exit status: 0 on success, 1 on runtime failures, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from .classifier import FittedModel, evaluate, fit, predict_batch
from .data import ARTIFICIAL_7, ShapeSpec, generate_artificial, load_csv, random_oversample, save_csv, stratified_holdout
from .graph import DEFAULT_THETA, FeatureWeights
from .harness import ExperimentConfig, compare, emit_report, read_report, run_cv
from .optimizer import GAConfig, GridConfig, fitness, ga_optimize, grid_search, read_config

SEED_ENV = "MSTNET_SEED"


def _default_seed() -> int:
    try:
        return int(os.environ.get(SEED_ENV, "0"))
    except ValueError:
        return 0


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _echo(command: str, settings: dict) -> None:
    print(json.dumps({"command": command, **settings}, sort_keys=True, default=str))


def _add_data(p, required=True):
    p.add_argument("--data", required=required, help="input CSV file with a header row")
    p.add_argument("--label-col", default=None,
                   help="label column name or index (default: last column)")


def _add_seed(p):
    p.add_argument("--seed", type=int, default=_default_seed(),
                   help=f"random seed (default: ${SEED_ENV} or 0)")


def _add_theta(p):
    p.add_argument("--theta", type=float, default=DEFAULT_THETA,
                   help="pruning factor: edges above theta*median are dropped (default: 0.8)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mstnet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mstnet {__version__}")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker processes for cross-validation folds (0 = all CPUs)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("generate", help="write an artificial spiral/star dataset")
    p.add_argument("--shapes", default=",".join(ARTIFICIAL_7),
                   help="comma-separated kind[:count[:n]] items, kind in {spiral, star} "
                        "(default: %(default)s)")
    p.add_argument("--n", type=int, default=200, help="samples per class (default: 200)")
    p.add_argument("--overlap", type=float, default=0.0, help="Gaussian noise std (default: 0)")
    _add_seed(p)
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("fit", help="fit a model and save it")
    _add_data(p)
    _add_theta(p)
    p.add_argument("--weights", type=_floats, default=None,
                   help="comma-separated feature weights (default: all 1)")
    p.add_argument("--no-scale", action="store_true", help="skip min-max scaling")
    p.add_argument("--oversample", action="store_true", help="balance classes before fitting")
    _add_seed(p)
    p.add_argument("--out", required=True, help="output model file")

    p = sub.add_parser("predict", help="label samples with a saved model")
    p.add_argument("--model", required=True, help="model file written by 'fit'")
    _add_data(p)
    p.add_argument("--out", required=True, help="output CSV of labels and deltas")

    p = sub.add_parser("cv", help="k-fold cross-validation experiment")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="input CSV file with a header row")
    src.add_argument("--shapes", help="generate data instead: kind[:count[:n]],...")
    p.add_argument("--label-col", default=None, help="label column (default: last)")
    p.add_argument("--n", type=int, default=200, help="samples per generated class")
    p.add_argument("--overlap", type=float, default=0.0, help="noise for generated data")
    p.add_argument("--k", type=int, default=10, help="number of folds (default: 10)")
    _add_theta(p)
    _add_seed(p)
    p.add_argument("--optimizer", choices=["none", "grid", "ga"], default="none",
                   help="feature-weight search run inside each fold (default: none)")
    p.add_argument("--ga-config", help="key = value file of GA settings")
    p.add_argument("--grid-values", type=_floats, default=None,
                   help="comma-separated grid of per-feature weights")
    p.add_argument("--max-evals", type=int, default=None, help="grid evaluation cap")
    p.add_argument("--holdout", type=float, default=0.2,
                   help="validation fraction for weight optimization (default: 0.2)")
    p.add_argument("--no-oversample", action="store_true", help="do not balance training folds")
    p.add_argument("--no-scale", action="store_true", help="skip min-max scaling")
    p.add_argument("--reference", action="store_true", help="also score a 1-nearest-neighbour baseline")
    p.add_argument("--format", choices=["structured", "tabular"], default=None,
                   help="report format (default: tabular for .csv paths, else structured)")
    p.add_argument("--out", required=True, help="report path")

    p = sub.add_parser("optimize", help="optimize feature weights on one holdout split")
    _add_data(p)
    _add_theta(p)
    _add_seed(p)
    p.add_argument("--optimizer", choices=["ga", "grid"], default="ga", help="search method (default: ga)")
    p.add_argument("--ga-config", help="key = value file of GA settings")
    p.add_argument("--grid-config", help="key = value file of grid settings")
    p.add_argument("--holdout", type=float, default=0.2, help="validation fraction (default: 0.2)")
    p.add_argument("--no-scale", action="store_true", help="skip min-max scaling")
    p.add_argument("--out", required=True, help="result JSON path")

    p = sub.add_parser("report", help="convert or compare structured reports")
    p.add_argument("--input", required=True, help="structured report (JSON)")
    p.add_argument("--compare", help="second report; prints optimized-minus-baseline deltas")
    p.add_argument("--metric", choices=["accuracy", "macro_precision"], default="accuracy",
                   help="metric used by --compare (default: accuracy)")
    p.add_argument("--format", choices=["structured", "tabular", "summary"], default="summary",
                   help="output form (default: summary)")
    p.add_argument("--out", help="output path (default: stdout for summary)")
    return parser


# ----------------------------------------------------------------- commands


def cmd_generate(args):
    shapes = [ShapeSpec.parse(s, args.n) for s in args.shapes.split(",") if s.strip()]
    _echo("generate", {"shapes": args.shapes, "n": args.n, "overlap": args.overlap,
                       "seed": args.seed, "out": args.out})
    data = generate_artificial(shapes, args.overlap, args.seed)
    save_csv(data, args.out)


def cmd_fit(args):
    data = load_csv(args.data, args.label_col)
    weights = FeatureWeights(args.weights) if args.weights else None
    _echo("fit", {"data": args.data, "label_col": args.label_col, "theta": args.theta,
                  "weights": args.weights, "scale": not args.no_scale,
                  "oversample": args.oversample, "seed": args.seed, "out": args.out})
    if args.oversample:
        data = random_oversample(data, args.seed)
    fit(data, weights, args.theta, scale=not args.no_scale).save(args.out)


def cmd_predict(args):
    model = FittedModel.load(args.model)
    _echo("predict", {"model": args.model, "data": args.data, "label_col": args.label_col,
                      "out": args.out})
    data = load_csv(args.data, args.label_col)
    preds = predict_batch(model, data)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "label", *(f"delta_{c}" for c in model.labels)])
        for i, p in enumerate(preds):
            w.writerow([i, p.label, *(repr(p.deltas[c]) for c in model.labels)])
    if set(data.labels.tolist()) <= set(model.labels):
        m = evaluate(preds, data.labels, classes=model.labels)
        print(f"accuracy {m.accuracy:.4f} macro_precision {m.macro_precision:.4f}")


def cmd_cv(args):
    ga = read_config(args.ga_config, GAConfig) if args.ga_config else GAConfig()
    grid = GridConfig(args.grid_values or GridConfig().grid_values, args.max_evals)
    shapes = ()
    if args.shapes:
        shapes = tuple(f"{s.kind}:{s.count}:{s.n}" for s in
                       (ShapeSpec.parse(t, args.n) for t in args.shapes.split(",") if t.strip()))
    config = ExperimentConfig(
        data=args.data, label_col=args.label_col, shapes=shapes, overlap=args.overlap,
        theta=args.theta, k=args.k, seed=args.seed, optimizer=args.optimizer, grid=grid, ga=ga,
        holdout=args.holdout, oversample=not args.no_oversample, scale=not args.no_scale,
        reference=args.reference,
    )
    fmt = args.format or ("tabular" if args.out.lower().endswith(".csv") else "structured")
    _echo("cv", {**config.to_dict(), "format": fmt, "out": args.out, "threads": args.threads})
    report = run_cv(config, n_jobs=args.threads)
    emit_report(report, args.out, fmt)
    for name, agg in report.aggregates.items():
        print(f"{name}: accuracy mean {agg['accuracy']['mean']:.4f} "
              f"macro_precision mean {agg['macro_precision']['mean']:.4f}")


def cmd_optimize(args):
    data = load_csv(args.data, args.label_col)
    if args.optimizer == "ga":
        cfg = read_config(args.ga_config, GAConfig) if args.ga_config else GAConfig(seed=args.seed)
    else:
        cfg = read_config(args.grid_config, GridConfig) if args.grid_config else GridConfig()
    _echo("optimize", {"data": args.data, "label_col": args.label_col, "theta": args.theta,
                       "seed": args.seed, "optimizer": args.optimizer, "holdout": args.holdout,
                       "scale": not args.no_scale, "config": cfg.__dict__, "out": args.out})
    keep, hold = stratified_holdout(data, args.holdout, args.seed)
    train, val = data.subset(keep), data.subset(hold)
    scale = not args.no_scale
    if args.optimizer == "ga":
        result = ga_optimize(cfg, train, val, args.theta, scale)
    else:
        result = grid_search(cfg, train, val, args.theta, scale)
    out = result.to_dict()
    out["baseline_fitness"] = fitness(FeatureWeights.uniform(data.n_features), train, val, args.theta, scale)
    out["feature_names"] = data.feature_names
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(out, fh, indent=1)
        fh.write("\n")
    print(f"best fitness {result.best_fitness:.4f} (uniform {out['baseline_fitness']:.4f}) "
          f"after {result.evaluations} evaluations")


def cmd_report(args):
    _echo("report", {"input": args.input, "compare": args.compare, "metric": args.metric,
                     "format": args.format, "out": args.out})
    report = read_report(args.input)
    if args.compare:
        result = compare(report, read_report(args.compare), args.metric)
        text = json.dumps(result, indent=1)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        print(f"mean improvement {result['mean_improvement_points']:+.2f} points "
              f"({result['optimized']} vs {result['baseline']}, {args.metric})")
        return
    if args.format == "summary":
        lines = []
        for name, agg in report.aggregates.items():
            for metric, s in agg.items():
                lines.append(f"{name} {metric}: mean {s['mean']:.4f} median {s['median']:.4f} "
                             f"min {s['min']:.4f} max {s['max']:.4f} std {s['std']:.4f}")
        text = "\n".join(lines)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return
    if not args.out:
        raise ValueError("--out is required for structured and tabular output")
    emit_report(report, args.out, args.format)


COMMANDS = {
    "generate": cmd_generate,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "cv": cmd_cv,
    "optimize": cmd_optimize,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"mstnet {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
