"""Command-line front end for the fire-outbreak pipeline.

One binary, eight subcommands covering the whole workflow:

    simulate   serve telemetry frames over HTTP (replay or synthetic)
    ingest     poll a device endpoint and append readings to a dataset
    generate   write a synthetic labeled dataset
    split      partition a dataset into train/test/validation CSVs
    train      fit the classifier and write a model file
    predict    label a CSV or a single --point reading
    evaluate   score a model on a labeled CSV; metrics, ROC data, figure
    visualize  emit lag/correlation/Andrews data files and figures

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import dataset as ds
from . import ingest, svm
from ._numfmt import format_float
from .errors import ConfigError, FirewatchError
from .metrics import confusion, metrics as compute_metrics, render_metrics, roc, roc_to_json

log = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _parse_triple(text: str, flag: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"{flag} expects three comma-separated numbers, got {text!r}")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{flag} has a non-numeric entry in {text!r}") from None
    if any(not math.isfinite(v) for v in values):
        raise ConfigError(f"{flag} values must be finite, got {text!r}")
    return values


def _parse_pair(text: str, flag: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"{flag} expects 'min,max', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"{flag} has a non-numeric entry in {text!r}") from None


def _load_points(path: str) -> list[tuple[float, float, float]]:
    """Feature rows from a CSV with or without the Label column."""
    text = Path(path).read_text(encoding="utf-8") if Path(path).exists() else None
    if text is None:
        raise ConfigError(f"input file {path} does not exist")
    lines = [line for line in text.split("\n") if line.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty file")
    if lines[0].strip() == ds.CSV_HEADER:
        return [row.features for row in ds.load_dataset(path).rows]
    if lines[0].strip() != "Temp,Smoke,Flame":
        raise ConfigError(
            f"{path}: header {lines[0].strip()!r} is neither labeled nor unlabeled schema"
        )
    points = []
    for i, line in enumerate(lines[1:], start=1):
        cells = line.split(",")
        if len(cells) != 3:
            raise ConfigError(f"{path}: row {i} has {len(cells)} cells, expected 3")
        try:
            points.append(tuple(float(c) for c in cells))
        except ValueError:
            raise ConfigError(f"{path}: row {i} has a non-numeric cell") from None
    return points


# ---------------------------------------------------------------------------
# Subcommands

def cmd_simulate(args) -> int:
    if args.replay:
        scenario = ingest.SimulatorScenario(
            mode="replay",
            source=args.replay,
            noise_std=_parse_triple(args.noise, "--noise"),
            rng_seed=args.seed,
            listen_address=args.listen,
            wrap=not args.no_wrap,
        )
    else:
        scenario = ingest.SimulatorScenario(
            mode="synthetic",
            source=ds.GeneratorParams(n=1, rng_seed=args.seed),
            noise_std=_parse_triple(args.noise, "--noise"),
            rng_seed=args.seed,
            listen_address=args.listen,
            wrap=not args.no_wrap,
        )
    sim = ingest.DeviceSimulator(scenario).start()
    try:
        print(f"serving telemetry on {sim.url}", flush=True)
        while args.max_requests == 0 or sim.requests_served < args.max_requests:
            time.sleep(0.05)
    except KeyboardInterrupt:
        pass
    finally:
        sim.stop()
    return 0


def cmd_ingest(args) -> int:
    label_mode = {"0": "fixed-0", "1": "fixed-1", "rule": "rule", "none": "unlabeled"}[args.label]
    cfg = ingest.ReceptorConfig(
        endpoint_url=args.endpoint,
        output_path=args.out,
        poll_interval_ms=args.interval_ms,
        max_samples=args.count,
        label_mode=label_mode,
    )
    summary = ingest.run_receptor(cfg)
    print(f"appended={summary.appended} failed={summary.failed}")
    return 0


def cmd_generate(args) -> int:
    ranges = (
        _parse_pair(args.temp_range, "--temp-range"),
        _parse_pair(args.smoke_range, "--smoke-range"),
        _parse_pair(args.flame_range, "--flame-range"),
    )
    if args.rule_weights or args.rule_threshold is not None:
        if not (args.rule_weights and args.rule_threshold is not None):
            raise ConfigError("--rule-weights and --rule-threshold must be given together")
        rule = ds.LabelRule(
            weights=_parse_triple(args.rule_weights, "--rule-weights"),
            threshold=args.rule_threshold,
        )
    else:
        rule = ds.default_label_rule(ranges)
    data = ds.generate_synthetic(
        ds.GeneratorParams(n=args.n, ranges=ranges, rule=rule, rng_seed=args.seed)
    )
    ds.save_dataset(data, args.out)
    positives = sum(data.labels())
    print(f"wrote {len(data)} rows ({positives} labeled 1) to {args.out}")
    return 0


def cmd_split(args) -> int:
    data = ds.load_dataset(args.input_path)
    spec = ds.SplitSpec(
        train_fraction=args.train,
        test_fraction=args.test,
        validation_fraction=args.validation,
        rng_seed=args.seed,
        stratified=args.stratified,
    )
    train_part, test_part, val_part = ds.split(data, spec)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", train_part), ("test", test_part), ("validation", val_part)):
        ds.save_dataset(part, out_dir / f"{name}.csv")
    print(
        f"train={len(train_part)} test={len(test_part)} validation={len(val_part)}"
        f" -> {out_dir}"
    )
    return 0


def cmd_train(args) -> int:
    data = ds.load_dataset(args.input_path)
    model = svm.train(
        data.training_pairs(),
        svm.KernelConfig(gamma=args.gamma),
        svm.TrainConfig(
            c=args.c,
            kkt_tolerance=args.tol,
            max_passes=args.max_passes,
            rng_seed=args.seed,
        ),
    )
    svm.save_model(model, args.model)
    print(f"support vectors: {len(model.alphas)}")
    print(f"converged: {'yes' if model.converged else 'no'}")
    print(f"model written: {args.model}")
    if not model.converged:
        sys.stderr.write(
            "warning: training did not converge within the sweep budget;"
            " the saved model is best-so-far\n"
        )
    return 0


def cmd_predict(args) -> int:
    model = svm.load_model(args.model)
    if args.point:
        points = [_parse_triple(args.point, "--point")]
    else:
        points = _load_points(args.input_path)
    for label in svm.predict_many(model, points):
        print(label)
    return 0


def cmd_evaluate(args) -> int:
    model = svm.load_model(args.model)
    data = ds.load_dataset(args.input_path)
    if len(data) == 0:
        raise ConfigError(f"{args.input_path}: no rows to evaluate")
    features = [row.features for row in data.rows]
    actual = data.labels()
    scores = svm.decision_values(model, features)
    predicted = [1 if s >= 0.0 else 0 for s in scores]
    cm = confusion(predicted, actual)
    report = compute_metrics(cm)

    curve = None
    if len(set(actual)) == 2:
        curve = roc(scores, actual)
        Path(args.roc_out).write_text(roc_to_json(curve) + "\n", encoding="utf-8")
        if not args.no_figures:
            from . import figures

            figures.save_roc_figure(curve, Path(args.roc_out).with_suffix(".png"))
    else:
        sys.stderr.write(
            "warning: test data has a single class; ROC sweep is undefined, skipping\n"
        )

    if args.json:
        payload = {
            "tp": cm.tp, "tn": cm.tn, "fp": cm.fp, "fn": cm.fn, "n": report.n,
            "tpr": report.tpr, "fpr": report.fpr, "precision": report.precision,
            "accuracy": report.accuracy, "error_rate": report.error_rate,
        }
        if curve is not None:
            payload["auc"] = curve.auc
            payload["roc_points"] = [list(p) for p in curve.points]
            payload["roc_file"] = str(args.roc_out)
        print(json.dumps(payload, indent=2))
    else:
        for name in ("tp", "tn", "fp", "fn"):
            print(f"{name}={getattr(cm, name)}")
        print(render_metrics(report))
        if curve is not None:
            print(f"auc={format_float(curve.auc)}")
            print(f"roc data written: {args.roc_out}")
    return 0


def cmd_visualize(args) -> int:
    data = ds.load_dataset(args.input_path)
    if len(data) == 0:
        raise ConfigError(f"{args.input_path}: no rows to visualize")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    pairs = ds.lag_plot_data(data.column(args.column), args.lag)
    matrix = ds.correlation_matrix(data)
    curves = ds.andrews_curves(data, args.resolution)

    files = {
        "lag_csv": out_dir / "lag.csv",
        "corr_json": out_dir / "corr.json",
        "andrews_csv": out_dir / "andrews.csv",
    }
    ds.write_lag_csv(pairs, files["lag_csv"])
    ds.write_correlation_json(matrix, files["corr_json"])
    ds.write_andrews_csv(curves, files["andrews_csv"])

    if not args.no_figures:
        from . import figures

        files["lag_png"] = out_dir / "lag.png"
        files["corr_png"] = out_dir / "corr.png"
        files["andrews_png"] = out_dir / "andrews.png"
        figures.save_lag_figure(pairs, files["lag_png"], args.column, args.lag)
        figures.save_correlation_figure(matrix, list(ds.FEATURE_NAMES) + ["Label"], files["corr_png"])
        figures.save_andrews_figure(curves, files["andrews_png"])

    if args.json:
        print(json.dumps({
            "rows": len(data),
            "lag_pairs": len(pairs),
            "andrews_curves": len(curves),
            "files": {k: str(v) for k, v in files.items()},
        }, indent=2))
    else:
        for k, v in files.items():
            print(f"{k}: {v}")
    return 0


# ---------------------------------------------------------------------------
# Parser

def build_parser() -> _Parser:
    parser = _Parser(prog="firewatch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="serve telemetry frames over HTTP")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--replay", metavar="CSV", help="dataset file to replay in order")
    src.add_argument("--synthetic", action="store_true", help="draw readings uniformly")
    p.add_argument("--listen", default="127.0.0.1:0", help="host:port (port 0 = ephemeral)")
    p.add_argument("--noise", default="0,0,0", help="per-feature Gaussian noise std")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-wrap", action="store_true", help="stop after one replay pass")
    p.add_argument("--max-requests", type=int, default=0, help="exit after N data requests (0 = run forever)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ingest", help="poll a device endpoint into a dataset CSV")
    p.add_argument("--endpoint", required=True, help="device URL, e.g. http://host:port/data")
    p.add_argument("--out", required=True, help="dataset CSV to append to")
    p.add_argument("--interval-ms", type=int, default=250)
    p.add_argument("--count", type=int, default=None, help="stop after N appended readings")
    p.add_argument("--label", choices=("0", "1", "rule", "none"), default="none")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("generate", help="write a synthetic labeled dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--temp-range", default="15,50")
    p.add_argument("--smoke-range", default="27,95")
    p.add_argument("--flame-range", default="208,921")
    p.add_argument("--rule-weights", help="w1,w2,w3 of the labeling rule")
    p.add_argument("--rule-threshold", type=float, help="rule fires when w.x exceeds this")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("split", help="partition a dataset into train/test/validation")
    p.add_argument("--in", dest="input_path", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--train", type=float, default=0.6)
    p.add_argument("--test", type=float, default=0.2)
    p.add_argument("--validation", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stratified", action="store_true")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="fit the classifier on a labeled CSV")
    p.add_argument("--in", dest="input_path", required=True)
    p.add_argument("--model", required=True, help="output model file")
    p.add_argument("--gamma", type=float, default=svm.DEFAULT_GAMMA)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--max-passes", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label readings with a trained model")
    p.add_argument("--model", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="input_path", help="CSV of readings (Label column optional)")
    src.add_argument("--point", help="one reading as temp,smoke,flame")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a model on a labeled CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input_path", required=True)
    p.add_argument("--roc-out", default="roc.json", help="where to write ROC points")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--no-figures", action="store_true", help="skip the ROC png")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("visualize", help="emit lag/correlation/Andrews data and figures")
    p.add_argument("--in", dest="input_path", required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--column", choices=ds.FEATURE_NAMES + ("Label",), default="Temp")
    p.add_argument("--lag", type=int, default=1)
    p.add_argument("--resolution", type=int, default=101)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--no-figures", action="store_true", help="skip the pngs")
    p.set_defaults(func=cmd_visualize)

    return parser


def run(argv=None) -> int:
    """Parse and execute; returns the process exit code."""
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FirewatchError as exc:
        sys.stderr.write(f"firewatch {args.command}: error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"firewatch {args.command}: error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
