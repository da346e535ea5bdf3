"""Command-line interface: ``granular-tsvm <subcommand> ...``.

Every subcommand prints one JSON object on stdout (keys sorted, so output is
byte-stable for fixed arguments and seed) and optionally writes files.
Exit codes: 0 success, 1 unreadable or malformed input, 2 degenerate data,
3 non-convergence of granulation, 4 solver failure, 5 unsupported request
or bad usage.  The log level comes from ``GRANULAR_TSVM_LOG_LEVEL``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import gbtsvm, lsgbtsvm, vtub
from .benchmark import BenchmarkConfig, run_benchmark, summarize
from .dataset import (SYNTH_KINDS, MinMaxRecord, NoiseSpec, SynthSpec, generate_synthetic,
                      inject_label_noise, load_csv, minmax_normalize, save_csv)
from .errors import (ConvergenceError, DegenerateDataError, GranularTSVMError, ParseError,
                     SchemaError, SolverError, UnsupportedError)
from .evaluation import (GridSpec, ModelFamily, accuracy, load_accuracy_csv,
                         published_linear_table, stats_summary)
from .granulation import GranulationConfig, GranulationResult, granulate, plot_balls
from .kernels import KernelSpec
from .model import decision, load_model, predict, predict_raw, save_model
from .numerics import SolverConfig

log = logging.getLogger("granular_tsvm")

EXIT_OK, EXIT_PARSE, EXIT_DEGENERATE, EXIT_CONVERGENCE, EXIT_SOLVER, EXIT_USAGE = range(6)


class _Parser(argparse.ArgumentParser):
    # argparse's own usage exit code (2) would collide with "degenerate data"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj, path=None):
    text = json.dumps(obj, sort_keys=True, indent=None) + "\n"
    if path:
        Path(path).write_text(text)
    sys.stdout.write(text)


def _label_column(value):
    return value if value == "last" else int(value)


def _read(args):
    try:
        return load_csv(args.input, label_column=args.label_column, header=args.header)
    except OSError as exc:
        raise ParseError(f"cannot read {args.input}: {exc}") from exc


def _granulation_config(args):
    return GranulationConfig(args.purity, args.min_balls, args.max_iterations, args.seed)


def _solver_config(args):
    return SolverConfig(args.tolerance, args.max_sweeps, args.omega)


# -- subcommands -----------------------------------------------------------------


def cmd_granulate(args):
    d = _read(args)
    if args.normalize:
        d, _ = minmax_normalize(d)
    res = granulate(d, _granulation_config(args))
    out = res.to_json_obj()
    if args.output:
        Path(args.output).write_text(json.dumps(out, sort_keys=True) + "\n")
    if args.plot:
        if d.m != 2:
            raise UnsupportedError("plots are only drawn for 2-feature data")
        import matplotlib
        matplotlib.use("Agg")
        ax = plot_balls(res, d.features, d.labels)
        ax.figure.savefig(args.plot, dpi=120)
    _emit({"command": "granulate", "p": res.p, "p1": res.p1, "p2": res.p2,
           "iterations": res.iterations, "balls": out["balls"]})
    return EXIT_OK


def _fit(args, d):
    balls = granulate(d, _granulation_config(args))
    kernel = KernelSpec(args.kernel, args.sigma)
    label_map = d.meta.get("label_map")
    if args.model == "gbtsvm":
        hyper = gbtsvm.GBTSVMHyper(args.d1, args.d2, args.delta, _solver_config(args), kernel)
        return gbtsvm.fit(balls, hyper, label_map), balls
    hyper = lsgbtsvm.LSHyper(args.d1, args.d2, args.d3, args.d4, _solver_config(args), kernel,
                             args.solver_kind, args.seed)
    return lsgbtsvm.fit(balls, hyper, label_map), balls


def cmd_train(args):
    d = _read(args)
    norm = None
    if args.normalize:
        d, rec = minmax_normalize(d)
        norm = rec.to_dict()
    model, balls = _fit(args, d)
    model.normalization = norm
    model.hyper = dict(model.hyper, model=args.model, purity=args.purity,
                       min_balls=args.min_balls, seed=args.seed)
    save_model(model, args.output)
    train_acc = accuracy(predict(model, d.features), d.labels)
    _emit({"command": "train", "model": args.model, "mode": model.mode, "p": balls.p,
           "p1": balls.p1, "p2": balls.p2, "train_accuracy": train_acc,
           "output": str(args.output)})
    return EXIT_OK


def _model_and_features(args, labeled):
    model = load_model(args.model_file)
    if labeled:
        d = _read(args)
        X, y = d.features, d
    else:
        try:
            X = np.loadtxt(args.input, delimiter=",", ndmin=2, skiprows=1 if args.header else 0)
        except (OSError, ValueError) as exc:
            raise ParseError(f"cannot read features from {args.input}: {exc}") from exc
        y = None
    if model.normalization is not None:
        X = MinMaxRecord.from_dict(model.normalization).apply(X)
    return model, X, y


def cmd_predict(args):
    model, X, _ = _model_and_features(args, labeled=False)
    labels = predict_raw(model, X)
    d1, d2 = decision(model, X)
    if args.output:
        with open(args.output, "w", newline="") as f:
            csv.writer(f).writerows([[v] for v in labels])
    _emit({"command": "predict", "n": len(labels), "predictions": labels,
           "distances": [[float(a), float(b)] for a, b in zip(d1, d2)]})
    return EXIT_OK


def cmd_eval(args):
    model, X, d = _model_and_features(args, labeled=True)
    if model.label_map and d.meta.get("label_map") and model.label_map != d.meta["label_map"]:
        raise SchemaError("label values of the evaluation file differ from the training file")
    pred = predict(model, X)
    truth = d.labels
    conf = {"tp": int(np.sum((pred == 1) & (truth == 1))),
            "fn": int(np.sum((pred == -1) & (truth == 1))),
            "fp": int(np.sum((pred == 1) & (truth == -1))),
            "tn": int(np.sum((pred == -1) & (truth == -1)))}
    _emit({"command": "eval", "n": int(d.n), "accuracy": accuracy(pred, truth),
           "confusion": conf})
    return EXIT_OK


def cmd_benchmark(args):
    datasets = []
    for path in args.inputs:
        try:
            datasets.append((Path(path).stem, load_csv(path, label_column=args.label_column,
                                                       header=args.header)))
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc}") from exc
    grid = GridSpec(tuple(args.d_grid), tuple(args.sigma_grid), not args.untie_d12,
                    not args.untie_d34)
    families = [ModelFamily(name, args.kernel if name != "tsvm" else "linear", args.purity,
                            args.min_balls, args.seed, _solver_config(args), args.solver_kind)
                for name in args.models]
    cfg = BenchmarkConfig(tuple(args.noise), grid, args.folds, 0.7, args.seed, args.jobs,
                          args.normalize)
    rows = run_benchmark(datasets, families, cfg)
    if args.output_csv:
        with open(args.output_csv, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["dataset", "noise", "model", "accuracy", "cv_accuracy", "params"])
            for r in rows:
                w.writerow([r["dataset"], r["noise"], r["model"], r["accuracy"],
                            r["cv_accuracy"], json.dumps(r["params"], sort_keys=True)])
    out = {"command": "benchmark", "rows": rows, "grid": grid.to_dict(),
           "noise_levels": list(cfg.noise_levels)}
    if len(datasets) >= 2 and len(families) >= 2:
        out["stats"] = {str(nl): summarize(rows, nl) for nl in cfg.noise_levels}
    _emit(out, args.output)
    return EXIT_OK


def cmd_noise(args):
    d = _read(args)
    noisy = inject_label_noise(d, NoiseSpec(args.rate, args.seed))
    save_csv(noisy, args.output, header=False)
    _emit({"command": "noise", "n": int(d.n), "rate": args.rate, "seed": args.seed,
           "flipped": noisy.meta["noise"]["flipped"], "output": str(args.output)})
    return EXIT_OK


def cmd_synth(args):
    spec = SynthSpec(args.n, args.m, args.kind, args.class_balance, args.separation, args.seed)
    d = generate_synthetic(spec)
    save_csv(d, args.output, header=False)
    _emit({"command": "synth", "kind": args.kind, "n": int(d.n), "m": int(d.m),
           "positives": int(np.sum(d.labels == 1)), "seed": args.seed,
           "output": str(args.output)})
    return EXIT_OK


def cmd_stats(args):
    if args.published:
        table = published_linear_table()
    elif args.input:
        try:
            table = load_accuracy_csv(args.input)
        except OSError as exc:
            raise ParseError(f"cannot read {args.input}: {exc}") from exc
        except (ValueError, IndexError) as exc:
            raise ParseError(f"malformed accuracy table {args.input}: {exc}") from exc
    else:
        raise UnsupportedError("give an accuracy CSV or --published")
    _emit(dict(stats_summary(table, args.q_alpha), command="stats",
               datasets=list(table.dataset_names)), args.output)
    return EXIT_OK


def cmd_vtub(args):
    model = load_model(args.model_file)
    try:
        balls = GranulationResult.from_json_obj(json.loads(Path(args.balls).read_text()))
    except (OSError, ValueError, KeyError) as exc:
        raise ParseError(f"cannot read balls from {args.balls}: {exc}") from exc
    report = vtub.verify(model, balls, vtub.VTUBParams(args.Delta, args.delta))
    out = dict(report.to_json_obj(), command="vtub")
    if not args.pairs:
        out.pop("pairs")
    print(f"vtub: {len(report.pairs)} pairs, {len(report.violations)} violations, "
          f"max lhs/rhs {report.max_ratio:.3g}", file=sys.stderr)
    _emit(out, args.output)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def _add_input(p, name="input"):
    p.add_argument(name, help="CSV file, one sample per row")
    p.add_argument("--header", action="store_true", help="first row is a header")
    p.add_argument("--label-column", type=_label_column, default="last",
                   help="label column index or 'last' (default)")


def _add_granulation(p):
    p.add_argument("--purity", type=float, default=1.0, help="purity threshold T (default 1.0)")
    p.add_argument("--min-balls", type=int, default=2, help="minimum ball count (default 2)")
    p.add_argument("--max-iterations", type=int, default=10_000,
                   help="cap on splitting rounds (default 10000)")
    p.add_argument("--seed", type=int, default=0)


def _add_solver(p):
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--max-sweeps", type=int, default=10000)
    p.add_argument("--omega", type=float, default=1.0, help="relaxation factor in (0, 2)")
    p.add_argument("--solver-kind", choices=lsgbtsvm.SOLVER_KINDS, default="sor",
                   help="LS-GBTSVM sweep order: cyclic (sor) or shuffled (generic)")


def build_parser():
    parser = _Parser(prog="granular-tsvm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("granulate", help="cover a dataset with granular balls")
    _add_input(p)
    _add_granulation(p)
    p.add_argument("--normalize", action="store_true", help="min-max scale features first")
    p.add_argument("-o", "--output", help="write the full ball JSON here")
    p.add_argument("--plot", help="write a 2-D picture of the balls (needs matplotlib)")
    p.set_defaults(func=cmd_granulate)

    p = sub.add_parser("train", help="fit GBTSVM or LS-GBTSVM and save the model")
    _add_input(p)
    _add_granulation(p)
    _add_solver(p)
    p.add_argument("-o", "--output", required=True, help="model JSON path")
    p.add_argument("--model", choices=("gbtsvm", "lsgbtsvm"), default="gbtsvm")
    p.add_argument("--kernel", choices=("linear", "gaussian"), default="linear")
    p.add_argument("--sigma", type=float, default=1.0, help="gaussian kernel width")
    for k in ("d1", "d2", "d3", "d4"):
        p.add_argument(f"--{k}", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1e-6, help="GBTSVM ridge on H'H and G'G")
    p.add_argument("--normalize", action="store_true",
                   help="min-max scale features; the scaling is stored in the model")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label unlabeled samples with a saved model")
    p.add_argument("model_file")
    p.add_argument("input", help="CSV of features only")
    p.add_argument("--header", action="store_true")
    p.add_argument("-o", "--output", help="write one predicted label per line")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="accuracy of a saved model on a labeled CSV")
    p.add_argument("model_file")
    _add_input(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("benchmark", help="split / tune / refit / score over datasets")
    p.add_argument("inputs", nargs="+", help="labeled CSV files")
    p.add_argument("--header", action="store_true")
    p.add_argument("--label-column", type=_label_column, default="last")
    _add_granulation(p)
    _add_solver(p)
    p.add_argument("--models", nargs="+", choices=("gbtsvm", "lsgbtsvm", "tsvm"),
                   default=["gbtsvm", "lsgbtsvm", "tsvm"])
    p.add_argument("--kernel", choices=("linear", "gaussian"), default="linear")
    p.add_argument("--noise", nargs="+", type=float, default=[0.0], help="label-noise rates")
    p.add_argument("--d-grid", nargs="+", type=float,
                   default=[10.0 ** e for e in range(-5, 6)])
    p.add_argument("--sigma-grid", nargs="+", type=float,
                   default=[2.0 ** e for e in range(-5, 6)])
    p.add_argument("--untie-d12", action="store_true", help="search d1 and d2 separately")
    p.add_argument("--untie-d34", action="store_true", help="search d3 and d4 separately")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1, help="parallel grid cells")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--output-csv", help="per-cell accuracy table")
    p.add_argument("-o", "--output", help="also write the JSON result here")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("noise", help="flip a seeded fraction of labels")
    _add_input(p)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--kind", choices=SYNTH_KINDS, default="linear-margin")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--class-balance", type=float, default=0.5)
    p.add_argument("--separation", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("stats", help="ranks, Friedman, Nemenyi and win-tie-loss")
    p.add_argument("input", nargs="?", help="CSV: dataset column, then one column per model")
    p.add_argument("--published", action="store_true",
                   help="use the bundled linear-kernel benchmark accuracies")
    p.add_argument("--q-alpha", type=float, default=2.850)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("vtub", help="check slack differences against their bounds")
    p.add_argument("model_file", help="linear model JSON")
    p.add_argument("balls", help="ball JSON written by 'granulate -o'")
    p.add_argument("--Delta", type=float, default=1e3)
    p.add_argument("--delta", type=float, default=1e-6)
    p.add_argument("--pairs", action="store_true", help="include every pair in the output")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_vtub)
    return parser


def _exit_code(exc):
    if isinstance(exc, SolverError):
        return EXIT_SOLVER
    if isinstance(exc, ConvergenceError):
        return EXIT_CONVERGENCE
    if isinstance(exc, DegenerateDataError):
        return EXIT_DEGENERATE
    if isinstance(exc, (ParseError, SchemaError)):
        return EXIT_PARSE
    return EXIT_USAGE


def main(argv=None):
    logging.basicConfig(level=os.environ.get("GRANULAR_TSVM_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GranularTSVMError as exc:
        log.debug("failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
