"""Command-line entry point.

Exit status: 0 on success, 1 for usage errors, 2 for data or validation
errors. Diagnostics go to stderr; tables go to ``--out`` or stdout.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import experiments as ex
from .ddclass import ClassifierError, classify, depth_features, fit_classifier
from .depth import METHODS, DepthError, sample_depths
from .graph import GraphError
from .io import (
    DataError,
    default_threads,
    read_distance_matrix,
    read_labeled_csv,
    read_points_csv,
    write_dicts,
    write_distance_matrix,
    write_table,
)
from .metrics import MetricError, pairwise_distances, parse_metric, validate_distance_matrix
from .oracles import oracle_checks

DATA_ERRORS = (DataError, MetricError, GraphError, DepthError, ClassifierError, ex.StudyError, ValueError)

DEFAULTS = {
    "metric": "euclidean",
    "method": "spatial",
    "seed": 0,
    "label_col": "label",
    "bounds": [-4.0, 4.0, -4.0, 4.0],
    "resolution": 60,
    "n_circle": 150,
    "reps": None,
    "n_train": 150,
    "n_test": 50,
    "p_grid": [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file of option values; command-line flags take precedence")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="worker cap (default: METRICDEPTH_THREADS or cpu count)")


def _add_metric(p: argparse.ArgumentParser):
    p.add_argument(
        "--metric",
        help="euclidean | lp:<p> | arclength | hamming | discrete | rail | "
        "kernel:gaussian:<gamma> | kernel:rq | kernel:linear | knn:<k>",
    )
    p.add_argument("--knn", type=int, metavar="K", help="shorthand for --metric knn:K")
    p.add_argument("--kernel", metavar="SPEC", help="shorthand for --metric kernel:SPEC (gaussian:0.933, rq)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="metricdepth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("depth", help="depth of every sample point")
    _add_common(p)
    _add_metric(p)
    p.add_argument("--input", help="points CSV")
    p.add_argument("--distmat", help="precomputed distance-matrix CSV (replaces --input/--metric)")
    p.add_argument("--method", choices=METHODS)

    p = sub.add_parser("distmat", help="write the distance matrix of a points CSV")
    _add_common(p)
    _add_metric(p)
    p.add_argument("--input", help="points CSV")

    p = sub.add_parser("contour", help="depth over a regular planar grid")
    _add_common(p)
    _add_metric(p)
    p.add_argument("--input", help="points CSV (default: generated noisy circle)")
    p.add_argument("--n-circle", dest="n_circle", type=int, help="size of the generated circle sample")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--bounds", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    p.add_argument("--resolution", type=int)

    p = sub.add_parser("outlier-sim", help="sphere-mixture outlier study")
    _add_common(p)
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--lam", type=float, nargs="+")
    p.add_argument("--eps", dest="eps_grid", type=float, nargs="+")
    p.add_argument("--reps", type=int)
    p.add_argument("--methods", nargs="+", choices=METHODS)
    p.add_argument("--full", action="store_true", default=None, help="run the full lambda x n x eps sweep")

    p = sub.add_parser("ddclass", help="depth-depth classification of a test CSV")
    _add_common(p)
    _add_metric(p)
    p.add_argument("--train")
    p.add_argument("--test")
    p.add_argument("--label-col", dest="label_col")
    p.add_argument("--depth", dest="method", choices=METHODS)
    p.add_argument("--classifier", choices=("lda", "qda"))
    p.add_argument("--summary", help="accuracy summary JSON path")

    p = sub.add_parser("lpstudy", help="DD-classification accuracy across Lp metrics")
    _add_common(p)
    p.add_argument("--input", help="labeled CSV pool (default: synthetic Gaussian classes)")
    p.add_argument("--label-col", dest="label_col")
    p.add_argument("--p-grid", dest="p_grid", type=float, nargs="+")
    p.add_argument("--classifier", choices=("lda", "qda", "both"))
    p.add_argument("--reps", type=int)
    p.add_argument("--n-train", dest="n_train", type=int)
    p.add_argument("--n-test", dest="n_test", type=int)
    p.add_argument("--depth", dest="method", choices=METHODS)

    p = sub.add_parser("oracle-check", help="compare closed-form depths with the estimator")
    _add_common(p)
    return parser


def _merge(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise DataError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise DataError(f"config {args.config} must hold a JSON object")
        opts.update({k.replace("-", "_"): v for k, v in loaded.items()})
    opts.update({k: v for k, v in vars(args).items() if v is not None})
    if opts.get("knn") is not None:
        opts["metric"] = f"knn:{opts['knn']}"
    elif opts.get("kernel") is not None:
        opts["metric"] = f"kernel:{opts['kernel']}"
    if opts.get("threads") is None:
        opts["threads"] = default_threads()
    if opts["threads"] < 1:
        raise UsageError("--threads must be >= 1")
    return opts


def _require(opts, *names):
    for name in names:
        if not opts.get(name):
            raise UsageError(f"--{name.replace('_', '-')} is required")


def cmd_depth(opts):
    if opts.get("distmat"):
        d = read_distance_matrix(opts["distmat"])
        report = validate_distance_matrix(d, spot_checks=0)
        if not report.is_valid:
            raise DataError(f"{opts['distmat']}: not a valid distance matrix ({report})")
    else:
        _require(opts, "input")
        d = pairwise_distances(read_points_csv(opts["input"]), parse_metric(opts["metric"]))
    depths = sample_depths(d, opts["method"])
    write_table(opts.get("out"), ([i, v, depths.method] for i, v in enumerate(depths.values)), ["index", "depth", "method"])


def cmd_distmat(opts):
    _require(opts, "input")
    metric = parse_metric(opts["metric"])
    d = pairwise_distances(read_points_csv(opts["input"]), metric)
    report = validate_distance_matrix(d, spot_checks=1000, seed=opts["seed"])
    if report.triangle_violations:
        print(f"note: {report.triangle_violations} of {report.triples_checked} sampled triples violate "
              f"the triangle inequality under {metric}", file=sys.stderr)
    write_distance_matrix(opts.get("out"), d)


def cmd_contour(opts):
    if opts.get("input"):
        sample = read_points_csv(opts["input"])
    else:
        sample = ex.gen_circle_data(int(opts["n_circle"]), int(opts["seed"]))
    grid = ex.contour_grid(sample, parse_metric(opts["metric"]), tuple(opts["bounds"]), int(opts["resolution"]), opts["method"])
    write_table(opts.get("out"), grid.rows(), ["x", "y", "depth"])


def cmd_outlier(opts):
    reps = opts.get("reps")
    if opts.get("full"):
        configs = ex.OutlierStudyConfig.full_grid(replications=reps or 1000, seed=opts["seed"])
        if opts.get("methods"):
            for c in configs:
                c.methods = list(opts["methods"])
    else:
        fields = {k: opts[k] for k in ("n", "lam", "eps_grid", "methods", "dim") if opts.get(k) is not None}
        configs = [ex.OutlierStudyConfig(replications=reps or 100, seed=opts["seed"], **fields)]
    rows = []
    for config in configs:
        rows.extend(ex.run_outlier_study(config, threads=opts["threads"]))
    write_dicts(opts.get("out"), rows)


def _read_test(path, label_col, expected_width):
    """Test CSV with or without the label column."""
    points = read_points_csv(path)
    if points.shape[1] == expected_width:
        return points, None
    sample, values = read_labeled_csv(path, label_col)
    return sample.points.data, values[sample.labels]


def cmd_ddclass(opts):
    _require(opts, "train", "test")
    opts["classifier"] = opts.get("classifier") or "lda"
    train, train_values = read_labeled_csv(opts["train"], opts["label_col"])
    test_x, test_raw = _read_test(opts["test"], opts["label_col"], train.points.p)
    metric = parse_metric(opts["metric"])
    model = fit_classifier(opts["classifier"], depth_features(train, train.points, metric, opts["method"]), train.labels)
    predicted = train_values[classify(model, depth_features(train, test_x, metric, opts["method"]))]
    write_table(opts.get("out"), ([i, int(c)] for i, c in enumerate(predicted)), ["index", "predicted"])
    summary = {
        "n_train": int(train.points.n),
        "n_test": int(test_x.shape[0]),
        "metric": str(metric),
        "depth": opts["method"],
        "classifier": opts["classifier"],
        "accuracy": None if test_raw is None else float(np.mean(predicted == test_raw)),
    }
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if opts.get("summary"):
        with open(opts["summary"], "w") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)


def cmd_lpstudy(opts):
    if opts.get("input"):
        data, _ = read_labeled_csv(opts["input"], opts["label_col"])
    else:
        data = ex.gen_gaussian_classes(1000, seed=opts["seed"])
    classifier = opts.get("classifier") or "both"
    classifiers = ("lda", "qda") if classifier == "both" else (classifier,)
    rows = ex.lp_classification_study(
        data,
        p_grid=opts["p_grid"],
        classifiers=classifiers,
        n_train=int(opts["n_train"]),
        n_test=int(opts["n_test"]),
        replications=int(opts.get("reps") or 20),
        seed=int(opts["seed"]),
        method=opts["method"],
        threads=opts["threads"],
    )
    write_dicts(opts.get("out"), rows)


def cmd_oracle(opts):
    rows = oracle_checks(seed=opts["seed"])
    write_table(
        opts.get("out"),
        ([r["oracle"], r["analytic"], r["empirical"], r["gap"], "pass" if r["passed"] else "FAIL"] for r in rows),
        ["oracle", "analytic", "empirical", "gap", "status"],
    )
    return 0 if all(r["passed"] for r in rows) else 2


COMMANDS = {
    "depth": cmd_depth,
    "distmat": cmd_distmat,
    "contour": cmd_contour,
    "outlier-sim": cmd_outlier,
    "ddclass": cmd_ddclass,
    "lpstudy": cmd_lpstudy,
    "oracle-check": cmd_oracle,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        opts = _merge(args)
        return COMMANDS[args.command](opts) or 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
