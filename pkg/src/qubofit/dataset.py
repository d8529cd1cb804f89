"""Load, validate, subsample, and split embedding+fitness tables.

Canonical file format is a TSV with header ``id [sequence] fitness e0 e1 ...``;
the ``sequence`` column is optional and detected from the header. Floats may
use decimal or scientific notation; LF and CRLF line endings are accepted.
Row numbers in error messages are 1-based data-row indices (the header is
row 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DatasetError(ValueError):
    """Raised for malformed dataset files or invalid dataset operations."""


@dataclass(frozen=True)
class FitnessDataset:
    """Aligned records of (id, optional sequence, embedding row, fitness).

    Immutable after construction; safe to share across workers.
    """

    ids: tuple[str, ...]
    embeddings: np.ndarray  # (N, d) float64
    fitness: np.ndarray  # (N,) float64
    sequences: tuple[str, ...] | None = None

    def __post_init__(self):
        emb = np.asarray(self.embeddings, dtype=np.float64)
        fit = np.asarray(self.fitness, dtype=np.float64)
        if emb.ndim != 2:
            raise DatasetError(f"embeddings must be 2-D, got shape {emb.shape}")
        n = emb.shape[0]
        if n < 1 or emb.shape[1] < 1:
            raise DatasetError(f"need at least one record and one embedding column, got {emb.shape}")
        if fit.shape != (n,):
            raise DatasetError(f"fitness length {fit.shape} does not match {n} records")
        if len(self.ids) != n:
            raise DatasetError(f"ids length {len(self.ids)} does not match {n} records")
        if self.sequences is not None and len(self.sequences) != n:
            raise DatasetError(f"sequences length {len(self.sequences)} does not match {n} records")
        if not np.isfinite(emb).all():
            i, j = np.argwhere(~np.isfinite(emb))[0]
            raise DatasetError(f"non-finite embedding value at row {i + 1}, column e{j}")
        if not np.isfinite(fit).all():
            i = int(np.flatnonzero(~np.isfinite(fit))[0])
            raise DatasetError(f"non-finite fitness value at row {i + 1}, column fitness")
        emb.setflags(write=False)
        fit.setflags(write=False)
        object.__setattr__(self, "embeddings", emb)
        object.__setattr__(self, "fitness", fit)
        object.__setattr__(self, "ids", tuple(self.ids))
        if self.sequences is not None:
            object.__setattr__(self, "sequences", tuple(self.sequences))

    @property
    def n_records(self) -> int:
        return self.embeddings.shape[0]

    @property
    def dim(self) -> int:
        return self.embeddings.shape[1]

    def take(self, indices) -> "FitnessDataset":
        """New dataset holding the given records, in the given order."""
        idx = np.asarray(indices, dtype=np.intp)
        return FitnessDataset(
            ids=tuple(self.ids[i] for i in idx),
            embeddings=self.embeddings[idx].copy(),
            fitness=self.fitness[idx].copy(),
            sequences=tuple(self.sequences[i] for i in idx) if self.sequences is not None else None,
        )


def load_dataset(path, fmt: str = "tsv") -> FitnessDataset:
    """Parse the embeddings file at ``path`` into a validated FitnessDataset.

    ``fmt`` names the file format; "tsv" is the only canonical format.

    Raises:
        DatasetError: unknown format, empty file, missing columns, ragged
            rows, or non-finite values, each naming the offending
            row/column.
    """
    if fmt != "tsv":
        raise DatasetError(f"unknown dataset format {fmt!r}; only 'tsv' is supported")
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    lines = [ln for ln in lines if ln != ""]
    if not lines:
        raise DatasetError(f"{path}: empty file")

    header = lines[0].split("\t")
    if not header or header[0] != "id":
        raise DatasetError(f"{path}: header must start with 'id', got {header[:1]}")
    has_sequence = len(header) > 1 and header[1] == "sequence"
    fitness_col = 2 if has_sequence else 1
    if len(header) <= fitness_col or header[fitness_col] != "fitness":
        raise DatasetError(f"{path}: missing 'fitness' column in header")
    d = len(header) - fitness_col - 1
    if d < 1:
        raise DatasetError(f"{path}: header declares no embedding columns")

    ids: list[str] = []
    sequences: list[str] = []
    fit_tokens: list[str] = []
    emb_rows: list[list[str]] = []
    for row_no, line in enumerate(lines[1:], start=1):
        fields = line.split("\t")
        if len(fields) != len(header):
            got = max(0, len(fields) - fitness_col - 1)
            raise DatasetError(
                f"{path}: row {row_no} has {got} embedding values, header declares {d}"
            )
        ids.append(fields[0])
        if has_sequence:
            sequences.append(fields[1])
        fit_tokens.append(fields[fitness_col])
        emb_rows.append(fields[fitness_col + 1 :])
    if not ids:
        raise DatasetError(f"{path}: no data rows")

    fitness = _parse_float_column(fit_tokens, "fitness", path)
    try:
        embeddings = np.array(emb_rows, dtype=np.float64)
    except ValueError:
        # fall back to per-cell parsing to name the bad cell
        for i, row in enumerate(emb_rows, start=1):
            for j, tok in enumerate(row):
                try:
                    float(tok)
                except ValueError:
                    raise DatasetError(
                        f"{path}: row {i}, column e{j}: cannot parse {tok!r} as a float"
                    ) from None
        raise
    bad = np.argwhere(~np.isfinite(embeddings))
    if bad.size:
        i, j = bad[0]
        raise DatasetError(f"{path}: row {i + 1}, column e{j}: non-finite value")
    bad_fit = np.flatnonzero(~np.isfinite(fitness))
    if bad_fit.size:
        raise DatasetError(f"{path}: row {bad_fit[0] + 1}, column fitness: non-finite value")

    return FitnessDataset(
        ids=tuple(ids),
        embeddings=embeddings,
        fitness=fitness,
        sequences=tuple(sequences) if has_sequence else None,
    )


def _parse_float_column(tokens, name, path) -> np.ndarray:
    out = np.empty(len(tokens))
    for i, tok in enumerate(tokens, start=1):
        try:
            out[i - 1] = float(tok)
        except ValueError:
            raise DatasetError(f"{path}: row {i}, column {name}: cannot parse {tok!r} as a float") from None
    return out


def save_dataset(ds: FitnessDataset, path) -> None:
    """Write ``ds`` back out in the canonical TSV format."""
    cols = ["id"] + (["sequence"] if ds.sequences is not None else []) + ["fitness"]
    cols += [f"e{j}" for j in range(ds.dim)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(cols) + "\n")
        for i in range(ds.n_records):
            row = [ds.ids[i]]
            if ds.sequences is not None:
                row.append(ds.sequences[i])
            row.append(f"{ds.fitness[i]:.12g}")
            row.extend(f"{v:.12g}" for v in ds.embeddings[i])
            fh.write("\t".join(row) + "\n")


def subsample(ds: FitnessDataset, n: int, seed: int) -> FitnessDataset:
    """Draw ``n`` distinct records uniformly without replacement.

    Deterministic for a fixed seed; the input dataset is unmodified.
    """
    if not 1 <= n <= ds.n_records:
        raise DatasetError(f"cannot subsample {n} of {ds.n_records} records")
    rng = np.random.default_rng(seed)
    idx = rng.choice(ds.n_records, size=n, replace=False)
    return ds.take(idx)


def split(ds: FitnessDataset, train_fraction: float, seed: int):
    """Disjoint (train, test) cover with |train| = round-half-up(fraction * N)."""
    if not 0.0 < train_fraction < 1.0:
        raise DatasetError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = ds.n_records
    n_train = int(math.floor(train_fraction * n + 0.5))
    if n_train < 1 or n_train >= n:
        raise DatasetError(
            f"split of {n} records at fraction {train_fraction} leaves an empty part"
        )
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    return ds.take(perm[:n_train]), ds.take(perm[n_train:])
