"""Command-line interface.

Subcommands: validate, fit, optimize, export-qubo, run, report. All
errors print a diagnostic to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness
from .dataset import load_dataset
from .evaluation import hamming_nn, percentile
from .optimizers import METHODS, run_method
from .surrogate import export_qubo


def _cmd_validate(args) -> int:
    ds = load_dataset(args.data)
    seq = "with" if ds.sequences is not None else "without"
    print(
        f"OK: {ds.n_records} records, embedding dim {ds.dim}, {seq} sequences, "
        f"fitness in [{ds.fitness.min():.6g}, {ds.fitness.max():.6g}]"
    )
    return 0


def _cmd_fit(args) -> int:
    ds = load_dataset(args.data)
    pipeline = harness.fit_pipeline(ds, args.dim, args.projection, args.ridge_lambda, args.seed)
    meta = {
        "dataset": str(args.data),
        "records": ds.n_records,
        "embedding_dim": ds.dim,
        "latent_dim": args.dim,
        "projection": args.projection,
        "ridge_lambda": args.ridge_lambda,
        "seed": args.seed,
    }
    harness.save_model(args.out, pipeline, meta)
    print(f"fitted m={args.dim} {args.projection} model on {ds.n_records} records -> {args.out}")
    return 0


def _cmd_optimize(args) -> int:
    bundle = harness.load_model(args.model)
    q = bundle.surrogate
    book = bundle.train_book
    start_rng_seed = harness.derive_seed(args.seed, "start")
    start_idx = int(np.random.default_rng(start_rng_seed).integers(0, book.n_records))
    start_code = book.codes[start_idx]
    opt = run_method(
        args.method, q, start_code, None, harness.derive_seed(args.seed, "opt", args.method),
        trace=args.trace is not None,
    )
    print(f"method:      {args.method}")
    print(f"start:       {book.ids[start_idx]} score {opt.start_score:.6g}")
    print(f"best score:  {opt.best_score:.6g}  (improvement {opt.improvement:.6g})")
    print(f"best code:   {''.join(str(b) for b in opt.best_code)}")
    print(f"evaluations: {opt.evaluations}")
    for nn_id, dist, fit in hamming_nn(opt.best_code, book, k=args.neighbors):
        pct = percentile(fit, book.fitness)
        print(f"neighbor:    {nn_id} hamming {dist} fitness {fit:.6g} percentile {pct:.2f}")
    if args.trace is not None:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("step,best_score\n")
            for step, score in opt.trace or []:
                fh.write(f"{step},{score:.17g}\n")
        print(f"trace:       {args.trace}")
    return 0


def _cmd_export_qubo(args) -> int:
    bundle = harness.load_model(args.model)
    export_qubo(bundle.surrogate, args.out)
    print(f"wrote QUBO file for m={bundle.surrogate.dim} -> {args.out}")
    return 0


def _cmd_run(args) -> int:
    cfg = harness.ExperimentConfig.from_json(args.config)
    out_dir = args.out or cfg.output_dir
    if out_dir is None:
        raise harness.ConfigError("no output directory: pass --out or set output_dir in the config")
    report = harness.run_experiment(cfg, out_dir)
    ok = sum(1 for r in report.rows if r["status"] == "ok")
    failed = len(report.rows) - ok
    print(f"wrote {len(report.rows)} rows ({ok} ok, {failed} failed) -> {out_dir}")
    return 1 if ok == 0 else 0


def _cmd_report(args) -> int:
    rows = harness.read_runs(args.results)
    aggregates = harness.aggregate(rows)
    if args.format == "csv":
        print(harness._csv_text(harness.AGG_COLUMNS, aggregates), end="")
    else:
        report = harness.ExperimentReport(rows=rows, aggregates=aggregates, provenance={})
        print(harness._summary_text(report), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubofit",
        description="Binary latent fitness landscapes: fit QUBO surrogates and search them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an embeddings TSV against the format")
    p.add_argument("data", help="embeddings TSV path")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("fit", help="fit projector + thresholds + surrogate, write a model dir")
    p.add_argument("--data", required=True)
    p.add_argument("--dim", type=int, required=True, help="latent dimension m")
    p.add_argument("--projection", choices=("random", "pca"), default="pca")
    p.add_argument("--lambda", dest="ridge_lambda", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="model directory to write")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("optimize", help="search a fitted model with one method")
    p.add_argument("--model", required=True)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", metavar="CSV", default=None, help="write step,best_score trace")
    p.add_argument("--neighbors", type=int, default=1, help="retrieval neighbors to print")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("export-qubo", help="export the surrogate in QUBO file form")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_qubo)

    p = sub.add_parser("run", help="run a config-driven experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="results directory (overrides config output_dir)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("report", help="aggregate a results directory")
    p.add_argument("--in", dest="results", required=True)
    p.add_argument("--format", choices=("csv", "table"), default="table")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"qubofit: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
