"""Config-driven experiment driver: subsample, split, project, binarize,
fit, optimize with every configured method, and evaluate, across a grid of
sample sizes, latent dimensions, and seeds.

Subsystem seeds are derived from the master seed and the grid labels with
a stable hash (first 8 bytes of sha256 over ``master|size|dim|rep|label``),
so adding a method or dimension never perturbs the seeds of existing
cells. Reports are a pure function of (config, dataset bytes); the
timestamp lives only in provenance.json.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .binarization import Binarizer, CodeBook, binarize_batch, fit_thresholds, load_binarizer, save_binarizer
from .dataset import FitnessDataset, load_dataset, split, subsample
from .evaluation import evaluate_run
from .optimizers import METHODS, OptimizerParams, run_method
from .projection import (
    Projector,
    fit_pca_projection,
    fit_random_projection,
    load_projector,
    project_batch,
    save_projector,
)
from .surrogate import QuboSurrogate, export_qubo, fit_qubo, import_qubo


class ConfigError(ValueError):
    pass


def derive_seed(master_seed: int, *labels) -> int:
    """Stable 64-bit seed from the master seed and labeled grid position."""
    key = "|".join(str(x) for x in (master_seed, *labels))
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    sizes: tuple[int, ...] = (1000, 2000, 5000, 10000)
    dims: tuple[int, ...] = (8, 16, 32, 64)
    projection: str = "pca"
    train_fraction: float = 0.8
    ridge_lambda: float = 1.0
    methods: tuple[str, ...] = ("sa", "ga", "greedy", "random", "bo")
    master_seed: int = 0
    seeds: int = 5
    output_dir: str | None = None
    optimizer: OptimizerParams = field(default_factory=OptimizerParams)

    def __post_init__(self):
        if not self.methods:
            raise ConfigError("methods list must be nonempty")
        for meth in self.methods:
            if meth not in METHODS:
                raise ConfigError(f"unknown method {meth!r}; expected one of {METHODS}")
        if self.seeds < 1:
            raise ConfigError("seed count must be >= 1")
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise ConfigError("sizes must be nonempty, all >= 1")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ConfigError("dims must be nonempty, all >= 1")
        if self.projection not in ("random", "pca"):
            raise ConfigError(f"projection must be 'random' or 'pca', got {self.projection!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must be in (0, 1)")
        if self.ridge_lambda <= 0:
            raise ConfigError("ridge_lambda must be > 0")
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "methods", tuple(self.methods))

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        """Build a config from parsed JSON; unknown keys are rejected."""
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "dataset" not in raw:
            raise ConfigError("config must set 'dataset'")
        kwargs = dict(raw)
        if "optimizer" in kwargs and kwargs["optimizer"] is not None:
            opt_raw = kwargs["optimizer"]
            opt_known = {f.name for f in dataclasses.fields(OptimizerParams)}
            opt_unknown = set(opt_raw) - opt_known
            if opt_unknown:
                raise ConfigError(f"unknown optimizer keys: {sorted(opt_unknown)}")
            kwargs["optimizer"] = OptimizerParams(**opt_raw)
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["sizes"] = list(self.sizes)
        out["dims"] = list(self.dims)
        out["methods"] = list(self.methods)
        return out


RUN_COLUMNS = (
    "size",
    "dim",
    "method",
    "seed",
    "status",
    "error",
    "start_id",
    "start_score",
    "best_score",
    "improvement",
    "evaluations",
    "test_spearman",
    "nn_id",
    "nn_hamming",
    "nn_true_fitness",
    "nn_percentile",
)

AGG_METRICS = ("test_spearman", "improvement", "nn_true_fitness", "nn_percentile")


@dataclass
class ExperimentReport:
    rows: list[dict]
    aggregates: list[dict]
    provenance: dict


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return "" if x is None else str(x)


@dataclass(frozen=True)
class FittedPipeline:
    """Everything fitted on training data for one grid cell."""

    projector: Projector
    binarizer: Binarizer
    surrogate: QuboSurrogate
    train_book: CodeBook


def fit_pipeline(
    train: FitnessDataset, dim: int, projection: str, ridge_lambda: float, seed: int
) -> FittedPipeline:
    """Fit projector, thresholds, and surrogate on training records only."""
    if projection == "random":
        projector = fit_random_projection(train.dim, dim, seed)
    else:
        projector = fit_pca_projection(train.embeddings, dim)
    latents = project_batch(projector, train.embeddings)
    binarizer = fit_thresholds(latents)
    codes = binarize_batch(binarizer, latents)
    surrogate = fit_qubo(codes, train.fitness, ridge_lambda)
    book = CodeBook(codes=codes, fitness=train.fitness, ids=train.ids, sequences=train.sequences)
    return FittedPipeline(projector=projector, binarizer=binarizer, surrogate=surrogate, train_book=book)


def encode(pipeline: FittedPipeline, ds: FitnessDataset) -> np.ndarray:
    """Binary codes of a dataset under an already fitted pipeline."""
    return binarize_batch(pipeline.binarizer, project_batch(pipeline.projector, ds.embeddings))


def _failure_row(size, dim, method, rep, message) -> dict:
    row = {c: None for c in RUN_COLUMNS}
    row.update(size=size, dim=dim, method=method, seed=rep, status="failed", error=str(message))
    return row


def _run_cell(ds: FitnessDataset, cfg: ExperimentConfig, size: int, dim: int, rep: int) -> list[dict]:
    sub = subsample(ds, size, derive_seed(cfg.master_seed, size, dim, rep, "subsample"))
    train, test = split(sub, cfg.train_fraction, derive_seed(cfg.master_seed, size, dim, rep, "split"))
    pipeline = fit_pipeline(
        train, dim, cfg.projection, cfg.ridge_lambda,
        derive_seed(cfg.master_seed, size, dim, rep, "projection"),
    )
    test_codes = encode(pipeline, test)

    start_rng = np.random.default_rng(derive_seed(cfg.master_seed, size, dim, rep, "start"))
    start_idx = int(start_rng.integers(0, train.n_records))
    start_code = pipeline.train_book.codes[start_idx]
    start_id = pipeline.train_book.ids[start_idx]

    rows = []
    for method in cfg.methods:
        try:
            opt = run_method(
                method,
                pipeline.surrogate,
                start_code,
                cfg.optimizer,
                derive_seed(cfg.master_seed, size, dim, rep, "opt", method),
            )
            metrics = evaluate_run(pipeline.surrogate, pipeline.train_book, test_codes, test.fitness, opt)
            rows.append(
                {
                    "size": size,
                    "dim": dim,
                    "method": method,
                    "seed": rep,
                    "status": "ok",
                    "error": None,
                    "start_id": start_id,
                    "start_score": opt.start_score,
                    "best_score": opt.best_score,
                    "improvement": metrics.improvement,
                    "evaluations": opt.evaluations,
                    "test_spearman": metrics.test_spearman,
                    "nn_id": metrics.nn_id,
                    "nn_hamming": metrics.nn_hamming,
                    "nn_true_fitness": metrics.nn_true_fitness,
                    "nn_percentile": metrics.nn_percentile,
                }
            )
        except Exception as exc:  # failure isolation: one method must not sink the cell
            rows.append(_failure_row(size, dim, method, rep, exc))
    return rows


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> ExperimentReport:
    """Run the full grid and return (and optionally write) the report.

    Every (size, dim, method, seed) combination yields exactly one row,
    either ok or failed; a failure in a shared stage (subsample, split,
    fit) produces failure rows for all methods of that cell while other
    cells proceed. Cells run sequentially in a deterministic order.
    """
    ds = load_dataset(cfg.dataset)
    rows: list[dict] = []
    for size in cfg.sizes:
        for dim in cfg.dims:
            for rep in range(cfg.seeds):
                try:
                    rows.extend(_run_cell(ds, cfg, size, dim, rep))
                except Exception as exc:
                    rows.extend(_failure_row(size, dim, meth, rep, exc) for meth in cfg.methods)

    order = {
        (size, dim, meth): (i, j, k)
        for i, size in enumerate(cfg.sizes)
        for j, dim in enumerate(cfg.dims)
        for k, meth in enumerate(cfg.methods)
    }
    rows.sort(key=lambda r: (*order[(r["size"], r["dim"], r["method"])], r["seed"]))

    report = ExperimentReport(
        rows=rows,
        aggregates=aggregate(rows, key_order=order),
        provenance={
            "config": cfg.to_dict(),
            "seed_derivation": "int(sha256(master|size|dim|rep|label)[:8]) per subsystem",
            "subsystem_seeds": _subsystem_seeds(cfg),
            "artifact": "qubofit 0.1.0",
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
    )
    if out_dir is not None:
        write_report(report, out_dir)
    return report


def _subsystem_seeds(cfg: ExperimentConfig) -> dict:
    """Every derived seed of the grid, keyed size/dim/rep, for the provenance block."""
    out = {}
    for size in cfg.sizes:
        for dim in cfg.dims:
            for rep in range(cfg.seeds):
                labels = ["subsample", "split", "projection", "start"]
                labels += [f"opt:{meth}" for meth in cfg.methods]
                cell = {}
                for label in labels:
                    if label.startswith("opt:"):
                        cell[label] = derive_seed(cfg.master_seed, size, dim, rep, "opt", label[4:])
                    else:
                        cell[label] = derive_seed(cfg.master_seed, size, dim, rep, label)
                out[f"{size}/{dim}/{rep}"] = cell
    return out


def aggregate(rows: list[dict], key_order: dict | None = None) -> list[dict]:
    """Mean and sample standard deviation per (size, dim, method) group.

    Only ok rows contribute; std uses the n-1 denominator and is 0 for a
    single row.
    """
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        if row["status"] != "ok":
            continue
        groups.setdefault((row["size"], row["dim"], row["method"]), []).append(row)
    keys = sorted(groups, key=(lambda k: key_order[k]) if key_order else None)
    out = []
    for key in keys:
        members = groups[key]
        agg = {"size": key[0], "dim": key[1], "method": key[2], "n": len(members)}
        for metric in AGG_METRICS:
            values = np.array([r[metric] for r in members], dtype=np.float64)
            agg[f"mean_{metric}"] = float(values.mean())
            agg[f"std_{metric}"] = float(values.std(ddof=1)) if len(values) > 1 else 0.0
        out.append(agg)
    return out


def _csv_text(columns, dict_rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in dict_rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _summary_text(report: ExperimentReport) -> str:
    lines = []
    ok_rows = [r for r in report.rows if r["status"] == "ok"]
    failed = [r for r in report.rows if r["status"] != "ok"]

    # surrogate ranking accuracy: size x dim grid, mean over seeds
    by_cell: dict[tuple, dict[int, float]] = {}
    for r in ok_rows:
        by_cell.setdefault((r["size"], r["dim"]), {})[r["seed"]] = r["test_spearman"]
    sizes = sorted({s for s, _ in by_cell})
    dims = sorted({d for _, d in by_cell})
    if by_cell:
        lines.append("Test Spearman (mean over seeds)")
        header = ["samples"] + [f"dim={d}" for d in dims]
        grid = [header]
        for s in sizes:
            row = [str(s)]
            for d in dims:
                cell = by_cell.get((s, d))
                row.append(f"{np.mean(list(cell.values())):.3f}" if cell else "-")
            grid.append(row)
        lines.extend(_align(grid))
        lines.append("")

    if report.aggregates:
        lines.append("Optimization (mean +/- sample std over seeds)")
        grid = [["samples", "dim", "method", "improvement", "nn_true_fitness", "nn_percentile"]]
        for agg in report.aggregates:
            grid.append(
                [
                    str(agg["size"]),
                    str(agg["dim"]),
                    agg["method"],
                    f"{agg['mean_improvement']:.3f} +/- {agg['std_improvement']:.3f}",
                    f"{agg['mean_nn_true_fitness']:.3f} +/- {agg['std_nn_true_fitness']:.3f}",
                    f"{agg['mean_nn_percentile']:.2f} +/- {agg['std_nn_percentile']:.2f}",
                ]
            )
        lines.extend(_align(grid))
        lines.append("")

    lines.append(f"rows: {len(ok_rows)} ok, {len(failed)} failed")
    return "\n".join(lines) + "\n"


def _align(grid: list[list[str]]) -> list[str]:
    widths = [max(len(row[i]) for row in grid) for i in range(len(grid[0]))]
    return ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in grid]


AGG_COLUMNS = ("size", "dim", "method", "n") + tuple(
    f"{stat}_{metric}" for metric in AGG_METRICS for stat in ("mean", "std")
)


def write_report(report: ExperimentReport, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "runs.csv").write_text(_csv_text(RUN_COLUMNS, report.rows), encoding="utf-8")
    (out / "aggregate.csv").write_text(_csv_text(AGG_COLUMNS, report.aggregates), encoding="utf-8")
    (out / "summary.txt").write_text(_summary_text(report), encoding="utf-8")
    (out / "provenance.json").write_text(
        json.dumps(report.provenance, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def read_runs(results_dir) -> list[dict]:
    """Load runs.csv back into typed row dicts (for the report subcommand)."""
    path = Path(results_dir) / "runs.csv"
    if not path.exists():
        raise ConfigError(f"{path}: no runs.csv found")
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for raw in csv.DictReader(fh):
            row: dict = dict(raw)
            for col in ("size", "dim", "seed", "evaluations", "nn_hamming"):
                row[col] = int(raw[col]) if raw[col] else None
            for col in ("start_score", "best_score", "improvement", "test_spearman",
                        "nn_true_fitness", "nn_percentile"):
                row[col] = float(raw[col]) if raw[col] else None
            row["error"] = raw["error"] or None
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# Model directory: the fit/optimize/export-qubo CLI surface.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelBundle:
    projector: Projector
    binarizer: Binarizer
    surrogate: QuboSurrogate
    train_book: CodeBook
    meta: dict


def save_model(model_dir, pipeline: FittedPipeline, meta: dict) -> None:
    out = Path(model_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_projector(pipeline.projector, out / "projector.tsv")
    save_binarizer(pipeline.binarizer, out / "thresholds.tsv")
    export_qubo(pipeline.surrogate, out / "surrogate.qubo")
    book = pipeline.train_book
    with open(out / "codebook.tsv", "w", encoding="utf-8") as fh:
        cols = ["id"] + (["sequence"] if book.sequences is not None else []) + ["fitness", "code"]
        fh.write("\t".join(cols) + "\n")
        for i in range(book.n_records):
            row = [book.ids[i]]
            if book.sequences is not None:
                row.append(book.sequences[i])
            row.append(f"{book.fitness[i]:.17g}")
            row.append("".join(str(b) for b in book.codes[i]))
            fh.write("\t".join(row) + "\n")
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_model(model_dir) -> ModelBundle:
    src = Path(model_dir)
    projector = load_projector(src / "projector.tsv")
    binarizer = load_binarizer(src / "thresholds.tsv")
    surrogate = import_qubo(src / "surrogate.qubo")
    lines = (src / "codebook.tsv").read_text(encoding="utf-8").splitlines()
    header = lines[0].split("\t")
    has_seq = "sequence" in header
    ids, seqs, fits, codes = [], [], [], []
    for line in lines[1:]:
        fields = line.split("\t")
        ids.append(fields[0])
        if has_seq:
            seqs.append(fields[1])
        fits.append(float(fields[-2]))
        codes.append([int(ch) for ch in fields[-1]])
    book = CodeBook(
        codes=np.array(codes, dtype=np.uint8),
        fitness=np.array(fits),
        ids=tuple(ids),
        sequences=tuple(seqs) if has_seq else None,
    )
    meta = json.loads((src / "meta.json").read_text(encoding="utf-8"))
    return ModelBundle(projector=projector, binarizer=binarizer, surrogate=surrogate, train_book=book, meta=meta)
