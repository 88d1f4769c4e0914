"""Command-line interface: ``geocurve {synth,fit,augment,eval,check,bench}``.

Exit codes: 0 ok, 1 self-check failure, 2 input error, 3 runtime failure,
64 usage error.
"""
import argparse
import csv
import io
import json
import logging
import os
import platform
import sys
import time

import numpy as np

from . import __version__
from . import io as gio
from . import selfcheck
from .augment_eval import CLASSIFIERS, METHODS, EvalConfig, augment_dataset, evaluate
from .errors import GeocurveError, InputError
from .fitting import FitConfig, fit, fit_all_classes
from .synth import synth

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2, 3, 64

log = logging.getLogger("geocurve")

FEATURE_SCHEMA = """\
feature CSV: header `label,f0,...,f{d-1}`, one row per sample; label is any
token, features are decimal reals; d >= 2; UTF-8, LF line endings."""

AUGMENTED_SCHEMA = """\
augmented CSV: header `label,p0,...,p{2d-1},augmented`; p* are interleaved
pre-shape coordinates (x1,y1,x2,y2,...); augmented is 1 for pseudo-labelled rows."""

CURVES_SCHEMA = """\
curves JSON (schema "geocurve.curves/1"): {"schema", "config": {...},
"classes": [{"label", "d", "m", "tau_start": [2d floats], "tau_end": [2d floats],
"theta", "final_loss": {"sim", "diverg", "total", "beta"}, "epochs",
"degenerate_events", "loss_trace": [floats]}]}"""

EVAL_SCHEMA = """\
eval JSON (schema "geocurve.eval/1"): {"method", "classifier", "k", "n", "m",
"seeds", "accuracies", "mean", "std", "config", ["raw_knn": {...}]}
eval CSV: header `seed,method,classifier,accuracy`, one row per seed (plus
`none-raw` rows for k-NN on raw features when --method none)."""

BENCH_SCHEMA = """\
bench JSON: {"m", "d", "epochs", "repeats", "seconds": [...], "mean", "std",
"hardware", "python", "numpy"}"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _default_threads():
    env = os.environ.get("GEOCURVE_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _common(p):
    p.add_argument("--seed", type=int, default=0, help="global seed (default 0)")
    p.add_argument("--threads", type=_positive_int, default=_default_threads(),
                   help="worker threads for per-class fits / per-seed runs (default $GEOCURVE_THREADS or 1)")
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("-v", "--verbose", action="store_true")


def _fit_flags(p, epochs_default=2000):
    p.add_argument("--beta", type=_nonneg_float, default=0.3, help="divergence-loss weight (default 0.3)")
    p.add_argument("--lr-p", type=_positive_float, default=3e-4, help="endpoint learning rate (default 3e-4)")
    p.add_argument("--lr-t", type=_positive_float, default=3e-3, help="sampling-parameter learning rate (default 3e-3)")
    p.add_argument("--epochs", type=_positive_int, default=epochs_default,
                   help=f"training epochs (default {epochs_default})")
    p.add_argument("--early-stop", action="store_true",
                   help="stop when the 100-epoch moving-average loss improves by < 1e-6")


def build_parser():
    parser = _Parser(prog="geocurve", description="Feature augmentation along fitted pre-shape geodesics.",
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    raw = argparse.RawDescriptionHelpFormatter

    p = sub.add_parser("synth", help="generate synthetic raw features", epilog=FEATURE_SCHEMA, formatter_class=raw)
    p.add_argument("--kind", choices=("gaussian", "geodesic"), default="geodesic")
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--per-class", type=int, default=5)
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--noise", type=_nonneg_float, default=0.05)
    _common(p)

    p = sub.add_parser("fit", help="fit one geodesic curve per class",
                       epilog=FEATURE_SCHEMA + "\n\n" + CURVES_SCHEMA, formatter_class=raw)
    p.add_argument("input", help="feature CSV")
    _fit_flags(p)
    _common(p)

    p = sub.add_parser("augment", help="sample pseudo-labelled pre-shapes from fitted curves",
                       epilog=CURVES_SCHEMA + "\n\n" + AUGMENTED_SCHEMA, formatter_class=raw)
    p.add_argument("curves", help="curves JSON from `fit`")
    p.add_argument("--n", type=_nonneg_int, default=None, help="samples per class (default: m of each class)")
    _common(p)

    p = sub.add_parser("eval", help="evaluate classification with and without augmentation",
                       epilog=FEATURE_SCHEMA + "\n\n" + EVAL_SCHEMA, formatter_class=raw)
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--method", choices=METHODS, default="none")
    p.add_argument("--classifier", choices=CLASSIFIERS, default="knn")
    p.add_argument("--k", type=_positive_int, default=5)
    p.add_argument("--n", type=_nonneg_int, default=None, help="augmented samples per class (default m)")
    p.add_argument("--seeds", type=_positive_int, default=6, help="number of seeds: seed, seed+1, ... (default 6)")
    p.add_argument("--p-g", type=float, default=0.3, help="probability of an originals-only epoch (linear head)")
    p.add_argument("--lam", type=_nonneg_float, default=0.5, help="augmented-loss weight (linear head)")
    p.add_argument("--csv", default=None, help="per-seed CSV path (default: --out with .csv suffix)")
    _fit_flags(p)
    _common(p)

    p = sub.add_parser("check", help="run the randomized self-check suites",
                       epilog=CURVES_SCHEMA + "\n\n" + AUGMENTED_SCHEMA, formatter_class=raw)
    p.add_argument("--curves", help="curves JSON; with --augmented, verify every augmented row lies on its curve")
    p.add_argument("--augmented", help="augmented CSV produced by `augment`")
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    _common(p)

    p = sub.add_parser("bench", help="time a single-class fit", epilog=BENCH_SCHEMA, formatter_class=raw)
    p.add_argument("--m", type=_positive_int, default=10)
    p.add_argument("--d", type=int, default=192)
    p.add_argument("--epochs", type=_positive_int, default=2000)
    p.add_argument("--repeats", type=_positive_int, default=3)
    _common(p)
    return parser


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _fit_config(args):
    return FitConfig(beta=args.beta, lr_endpoints=args.lr_p, lr_t=args.lr_t, epochs=args.epochs,
                     seed=args.seed, early_stop=args.early_stop)


def cmd_synth(args):
    if args.classes < 2 or args.per_class < 1 or args.dim < 4:
        raise UsageError("synth needs --classes >= 2, --per-class >= 1 and --dim >= 4")
    data = synth(args.kind, args.classes, args.per_class, args.dim, args.noise, args.seed)
    _write(args.out, gio.format_features(data))
    return EXIT_OK


def cmd_fit(args):
    data = gio.read_features(args.input)
    config = _fit_config(args)
    curves = fit_all_classes(data, config, threads=args.threads)
    for lab, fc in curves.items():
        log.info("class %s: sim=%.4g diverg=%.4g theta=%.4g", lab, fc.final_loss.sim, fc.final_loss.diverg,
                 fc.curve.theta)
    echo = {"beta": config.beta, "lr_p": config.lr_endpoints, "lr_t": config.lr_t, "epochs": config.epochs,
            "seed": config.seed, "early_stop": config.early_stop}
    _write(args.out, gio.curves_to_json(curves, echo, counts=data.counts()))
    return EXIT_OK


def cmd_augment(args):
    curves, counts = gio.read_curves(args.curves)
    if args.n is None:
        missing = [lab for lab, m in counts.items() if m is None]
        if missing:
            raise InputError(f"{args.curves}: no m recorded for {missing}; pass --n")
        parts = [augment_dataset({lab: curves[lab]}, int(counts[lab]), seed=args.seed) for lab in sorted(curves)]
        aug = parts[0]
        for part in parts[1:]:
            aug = aug.concat(part)
    else:
        aug = augment_dataset(curves, args.n, seed=args.seed)
    if len(aug) == 0:
        dim = next(iter(curves.values())).curve.dim if curves else 0
        aug.vectors = aug.vectors.reshape(0, dim)
    _write(args.out, gio.format_features(aug, prefix="p", augmented_column=True))
    return EXIT_OK


def cmd_eval(args):
    train = gio.read_features(args.train)
    test = gio.read_features(args.test)
    if not 0.0 <= args.p_g <= 1.0:
        raise UsageError("--p-g must lie in [0, 1]")
    config = EvalConfig(
        method=args.method, classifier=args.classifier, n=args.n, k=args.k,
        seeds=tuple(args.seed + i for i in range(args.seeds)), fit=_fit_config(args),
        p_g=args.p_g, lam=args.lam, threads=args.threads,
    )
    report = evaluate(train, test, config)
    _write(args.out, json.dumps(report.as_dict(), indent=1) + "\n")
    csv_path = args.csv
    if csv_path is None and args.out not in (None, "-"):
        csv_path = os.path.splitext(args.out)[0] + ".csv"
    if csv_path:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["seed", "method", "classifier", "accuracy"])
        for row in report.csv_rows():
            w.writerow([row[0], row[1], row[2], repr(float(row[3]))])
        _write(csv_path, buf.getvalue())
    return EXIT_OK


def cmd_check(args):
    results = selfcheck.run_all()
    if args.curves or args.augmented:
        if not (args.curves and args.augmented):
            raise UsageError("--curves and --augmented must be given together")
        curves, _ = gio.read_curves(args.curves)
        aug = gio.read_augmented(args.augmented)
        results.append(selfcheck.augmented_rows_on_curve(curves, aug))
    ok = all(r.passed for r in results)
    if args.json:
        doc = {"passed": ok, "suites": [
            {"name": r.name, "passed": r.passed, "metrics": r.metrics, "tolerances": r.tolerances,
             "seconds": r.seconds, "notes": r.notes} for r in results]}
        _write(args.out, json.dumps(doc, indent=1) + "\n")
    else:
        lines = [r.line() for r in results] + [f"overall: {'PASS' if ok else 'FAIL'}"]
        _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_CHECK


def hardware_string():
    model = None
    try:
        with open("/proc/cpuinfo", encoding="utf-8") as fh:
            for line in fh:
                if line.startswith("model name"):
                    model = line.split(":", 1)[1].strip()
                    break
    except OSError:
        pass
    return f"{model or platform.processor() or 'unknown CPU'} ({platform.machine()}, {os.cpu_count()} logical CPUs)"


def bench_fit(m, d, epochs, seed=0, repeats=1):
    """Wall-clock seconds for single-class fits on geodesic synthetic data."""
    data = synth("geodesic", 2, m, d, 0.05, seed)
    X = data.of_class(0)
    config = FitConfig(epochs=epochs, seed=seed)
    times = []
    for r in range(repeats):
        t0 = time.perf_counter()
        fit(X, config, np.random.default_rng(seed + r), label=0)
        times.append(time.perf_counter() - t0)
    return times


def cmd_bench(args):
    if args.d < 2:
        raise UsageError("--d must be >= 2")
    times = bench_fit(args.m, args.d, args.epochs, args.seed, args.repeats)
    doc = {
        "m": args.m, "d": args.d, "epochs": args.epochs, "repeats": args.repeats,
        "seconds": times, "mean": float(np.mean(times)), "std": float(np.std(times)),
        "hardware": hardware_string(), "python": platform.python_version(), "numpy": np.__version__,
    }
    _write(args.out, json.dumps(doc, indent=1) + "\n")
    return EXIT_OK


COMMANDS = {
    "synth": cmd_synth, "fit": cmd_fit, "augment": cmd_augment,
    "eval": cmd_eval, "check": cmd_check, "bench": cmd_bench,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"geocurve {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, OSError, UnicodeDecodeError) as exc:
        print(f"geocurve {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GeocurveError as exc:
        print(f"geocurve {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
