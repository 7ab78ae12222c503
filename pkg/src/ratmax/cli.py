"""Command-line interface: fit-activation, train, and evaluate.

Artifacts are JSON (models, reports) and CSV (error curves).  Every command
is deterministic for identical flags; reports embed the full flag set.  Set
RATMAX_LOG=debug|info|warning|error to control log verbosity.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time

import numpy as np

from . import activation as act_mod
from . import classify, data_io
from .core import AffineModel, SolverConfig
from .errors import RatmaxError

log = logging.getLogger("ratmax")


def _setup_logging() -> None:
    level = os.environ.get("RATMAX_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _flags(ns: argparse.Namespace) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(ns).items()) if k not in skip}


def _target_from_args(ns) -> act_mod.TargetFunction:
    if ns.target == "relu":
        return act_mod.relu_target()
    return act_mod.lrelu_target(ns.slope)


def cmd_fit_activation(ns: argparse.Namespace) -> int:
    target = _target_from_args(ns)
    cfg = SolverConfig(eps=ns.eps, delta=ns.delta,
                       interval=(ns.interval[0], ns.interval[1]),
                       grid_points=ns.grid)
    act, report = act_mod.fit_activation(target, cfg, ns.method)
    eq = act_mod.equioscillation_report(act, target, *cfg.interval,
                                        probe_points=ns.probe)
    print(f"fitted {ns.target} with {ns.method}: deviation {report.final_deviation:.12g} "
          f"in {report.iterations} iterations ({report.wall_time_seconds:.3f}s)")
    print(f"coefficients a0={act.a0:.15g} a1={act.a1:.15g} "
          f"b0={act.b0:.15g} b1={act.b1:.15g}")
    print(f"alternating extrema: {eq.alternations} "
          f"({'optimal' if eq.optimal else 'not certified'})")
    for x, e in eq.extrema:
        print(f"  x = {x:+.6f}   error = {e:+.9f}")

    if ns.out:
        meta = {
            "label_map": None,
            "trainer": {"method": ns.method, "eps": ns.eps, "delta": ns.delta,
                        "target": ns.target, "slope": ns.slope,
                        "grid": ns.grid, "interval": list(ns.interval)},
            "deviation": report.final_deviation,
            "flags": _flags(ns),
        }
        if not ns.omit_timing:
            meta["timing"] = {"train_seconds": report.wall_time_seconds}
        # identity pre-activation: the artifact evaluates R(x) for scalar x
        data_io.save_model(ns.out, act, AffineModel(np.array([1.0]), 0.0), meta)
        data_io.load_model(ns.out)  # self-check: artifact must be schema-valid
        log.info("wrote model to %s", ns.out)
    if ns.error_curve:
        xs = np.linspace(*cfg.interval, ns.probe)
        fx = target.values(xs)
        rx = act_mod.activation_curve(act, xs)
        with open(ns.error_curve, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "target", "approximation", "error"])
            for row in zip(xs, fx, rx, fx - rx):
                writer.writerow([repr(float(v)) for v in row])
        log.info("wrote error curve to %s", ns.error_curve)
    return 0


def _parse_subsample(text: str, seed: int):
    parts = text.split(":")
    if parts[0] == "random" and len(parts) == 2:
        return classify.RandomK(k=int(parts[1]), seed=seed)
    if parts[0] == "imbalance" and len(parts) == 3:
        keep = data_io._parse_label(parts[1])
        return classify.Imbalance(keep_class=keep, k_minority=int(parts[2]),
                                  seed=seed)
    raise RatmaxError(f"bad --subsample {text!r}; use random:K or imbalance:CLASS:K")


def cmd_train(ns: argparse.Namespace) -> int:
    act, _, _ = data_io.load_model(ns.activation)
    data = data_io.load_ucr(ns.train, delimiter=ns.delimiter, znorm=ns.znorm)
    if ns.subsample:
        data = classify.subsample_experiments(data, _parse_subsample(ns.subsample, ns.seed))
    cfg = SolverConfig(eps=ns.eps, delta=ns.delta, max_iters=ns.max_iters)
    t0 = time.perf_counter()
    model, report = classify.train_classifier(data, act, ns.method, cfg)
    train_seconds = time.perf_counter() - t0
    a_count, b_count = data.class_counts()
    print(f"trained on {data.n_samples} samples "
          f"({a_count}+{b_count} per class) with {ns.method}")
    print(f"training loss {report.final_deviation:.12g} "
          f"in {report.iterations} iterations ({train_seconds:.3f}s)")

    meta = {
        "label_map": data_io.label_map_pairs(data.classes),
        "trainer": {"method": ns.method, "eps": ns.eps, "delta": ns.delta,
                    "seed": ns.seed, "subsample": ns.subsample},
        "deviation": report.final_deviation,
        "training": {"iterations": report.iterations, "status": report.status,
                     "lp_solves": report.lp_solves,
                     "train_size": data.n_samples,
                     "class_counts": [a_count, b_count],
                     "provenance": data.provenance},
        "flags": _flags(ns),
    }
    if not ns.omit_timing:
        meta["timing"] = {"train_seconds": train_seconds}
    data_io.save_model(ns.out, act, model, meta)
    data_io.load_model(ns.out)  # self-check
    log.info("wrote network to %s", ns.out)
    return 0


def cmd_evaluate(ns: argparse.Namespace) -> int:
    act, model, meta = data_io.load_model(ns.net)
    if meta.get("label_map") is None:
        raise RatmaxError(f"{ns.net} has no label_map; was it trained?")
    classes = data_io.classes_from_label_map(meta["label_map"])
    data = data_io.load_ucr(ns.test, delimiter=ns.delimiter, znorm=ns.znorm)
    data = data.with_classes(classes)
    report = classify.evaluate(act, model, data,
                               outlier_threshold=ns.outlier_threshold)

    ca, cb = classes
    counts = report.confusion.counts
    print(f"accuracy {100.0 * report.accuracy:.2f}% on {report.evaluated} points"
          + (f" ({report.removed_outliers} outliers removed)"
             if report.removed_outliers else ""))
    print(f"test loss {report.test_loss:.6g}")
    print(f"{'':>12} predicted {ca!r:>8} {cb!r:>8}")
    print(f"actual {ca!r:>5} {counts[0, 0]:>16} {counts[0, 1]:>8}")
    print(f"actual {cb!r:>5} {counts[1, 0]:>16} {counts[1, 1]:>8}")
    if report.empty_after_filter:
        print("warning: the outlier threshold removed every test point")

    if ns.report:
        doc = report.to_dict(include_timing=not ns.omit_timing)
        doc["classes"] = list(classes)
        doc["flags"] = _flags(ns)
        data_io.dump_json(ns.report, doc)
        with open(ns.report, "r", encoding="utf-8") as fh:
            json.load(fh)  # self-check
        log.info("wrote report to %s", ns.report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratmax",
        description="Uniform-norm rational fitting and rational-activation "
                    "classification")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit-activation",
                         help="fit the (1,1) activation to relu or lrelu")
    fit.add_argument("--target", choices=["relu", "lrelu"], required=True)
    fit.add_argument("--slope", type=float, default=None,
                     help="negative-side slope, mandatory for lrelu")
    fit.add_argument("--interval", type=float, nargs=2, default=(-1.0, 1.0),
                     metavar=("C", "D"))
    fit.add_argument("--grid", type=int, default=2001)
    fit.add_argument("--method", choices=act_mod.METHODS, default="bisection")
    fit.add_argument("--eps", type=float, default=1e-5)
    fit.add_argument("--delta", type=float, default=1e-6)
    fit.add_argument("--probe", type=int, default=20001,
                     help="probe grid size for extrema and error curves")
    fit.add_argument("--out", default=None, help="model JSON output path")
    fit.add_argument("--error-curve", default=None,
                     help="CSV path for (x, target, approximation, error)")
    fit.add_argument("--omit-timing", action="store_true",
                     help="leave wall times out of artifacts for "
                          "byte-reproducible outputs")
    fit.set_defaults(func=cmd_fit_activation)

    train = sub.add_parser("train", help="train a classifier network")
    train.add_argument("--train", required=True, help="UCR-style training file")
    train.add_argument("--activation", required=True,
                       help="model JSON carrying the activation coefficients")
    train.add_argument("--method", choices=act_mod.METHODS, default="bisection")
    train.add_argument("--eps", type=float, default=1e-5)
    train.add_argument("--delta", type=float, default=1e-6)
    train.add_argument("--max-iters", type=int, default=500)
    train.add_argument("--subsample", default=None,
                       help="random:K or imbalance:CLASS:K")
    train.add_argument("--seed", type=int, default=0,
                       help="64-bit seed for subsampling")
    train.add_argument("--delimiter", choices=["auto", "tab", "comma"],
                       default="auto")
    train.add_argument("--znorm", action="store_true",
                       help="per-series standardisation at load time")
    train.add_argument("--out", required=True, help="network JSON output path")
    train.add_argument("--omit-timing", action="store_true")
    train.set_defaults(func=cmd_train)

    ev = sub.add_parser("evaluate", help="score a trained network on a test set")
    ev.add_argument("--test", required=True, help="UCR-style test file")
    ev.add_argument("--net", required=True, help="trained network JSON")
    ev.add_argument("--outlier-threshold", type=float, default=None)
    ev.add_argument("--report", default=None, help="report JSON output path")
    ev.add_argument("--delimiter", choices=["auto", "tab", "comma"],
                    default="auto")
    ev.add_argument("--znorm", action="store_true")
    ev.add_argument("--omit-timing", action="store_true")
    ev.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command == "fit-activation" and ns.target == "lrelu" and ns.slope is None:
        parser.error("--slope is mandatory for --target lrelu")
    try:
        return ns.func(ns)
    except RatmaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
