"""Linear dimensionality reduction: random Gaussian projection or PCA.

Both produce a ``Projector`` applying ``z = W (e - mean)``. Random
projection keeps ``mean`` at zero (no centering); PCA centers on the
training column mean and uses the top principal directions as rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ProjectionError(ValueError):
    pass


@dataclass(frozen=True)
class Projector:
    kind: str  # "random" | "pca"
    weights: np.ndarray  # (m, d)
    mean: np.ndarray = field(default=None)  # (d,), zeros for kind == "random"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2:
            raise ProjectionError(f"weights must be 2-D, got shape {w.shape}")
        mu = np.zeros(w.shape[1]) if self.mean is None else np.asarray(self.mean, dtype=np.float64)
        if mu.shape != (w.shape[1],):
            raise ProjectionError(f"mean shape {mu.shape} does not match input dim {w.shape[1]}")
        if self.kind not in ("random", "pca"):
            raise ProjectionError(f"unknown projector kind {self.kind!r}")
        if not (np.isfinite(w).all() and np.isfinite(mu).all()):
            raise ProjectionError("projector parameters must be finite")
        if self.kind == "random" and mu.any():
            raise ProjectionError("random projectors do not center: mean must be zero")
        w.setflags(write=False)
        mu.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "mean", mu)

    @property
    def input_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def output_dim(self) -> int:
        return self.weights.shape[0]


def fit_random_projection(d: int, m: int, seed: int) -> Projector:
    """Gaussian projector with i.i.d. Normal(0, 1/d) entries; no centering."""
    if d < 1 or m < 1:
        raise ProjectionError(f"dims must be >= 1, got d={d}, m={m}")
    rng = np.random.default_rng(seed)
    w = rng.normal(0.0, np.sqrt(1.0 / d), size=(m, d))
    return Projector(kind="random", weights=w, mean=np.zeros(d))


def fit_pca_projection(embeddings, m: int) -> Projector:
    """Top-m principal directions of the centered data, descending variance.

    Rows are sign-normalized: a row is flipped when its largest-magnitude
    entry is negative, so refits on identical data are bit-identical.
    """
    emb = np.asarray(embeddings, dtype=np.float64)
    if emb.ndim != 2 or emb.shape[0] < 2:
        raise ProjectionError("PCA needs a 2-D matrix with at least 2 rows")
    n, d = emb.shape
    if not 1 <= m <= min(n - 1, d):
        raise ProjectionError(f"m={m} out of range for {n}x{d} data (max {min(n - 1, d)})")
    mean = emb.mean(axis=0)
    centered = emb - mean
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    tol = svals[0] * max(n, d) * np.finfo(np.float64).eps if svals.size else 0.0
    rank = int(np.sum(svals > tol))
    if m > rank:
        raise ProjectionError(f"m={m} exceeds effective rank {rank} of the data")
    w = vt[:m].copy()
    for row in w:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return Projector(kind="pca", weights=w, mean=mean)


def project(p: Projector, e) -> np.ndarray:
    """Apply the fitted map to one embedding vector: W (e - mean)."""
    e = np.asarray(e, dtype=np.float64)
    if e.shape != (p.input_dim,):
        raise ProjectionError(f"vector of length {e.shape} does not match input dim {p.input_dim}")
    return p.weights @ (e - p.mean)


def project_batch(p: Projector, embeddings) -> np.ndarray:
    """Apply the fitted map to an (N, d) matrix, returning (N, m) latents."""
    emb = np.asarray(embeddings, dtype=np.float64)
    if emb.ndim != 2 or emb.shape[1] != p.input_dim:
        raise ProjectionError(f"matrix of shape {emb.shape} does not match input dim {p.input_dim}")
    return (emb - p.mean) @ p.weights.T


def save_projector(p: Projector, path) -> None:
    """TSV block: kind / d / m header lines, mean row, then the m rows of W."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"kind\t{p.kind}\n")
        fh.write(f"d\t{p.input_dim}\n")
        fh.write(f"m\t{p.output_dim}\n")
        fh.write("mean\t" + "\t".join(f"{v:.17g}" for v in p.mean) + "\n")
        for row in p.weights:
            fh.write("\t".join(f"{v:.17g}" for v in row) + "\n")


def load_projector(path) -> Projector:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    try:
        kind = lines[0].split("\t")[1]
        d = int(lines[1].split("\t")[1])
        m = int(lines[2].split("\t")[1])
        mean_fields = lines[3].split("\t")
        if mean_fields[0] != "mean":
            raise ProjectionError(f"{path}: expected mean row, got {mean_fields[0]!r}")
        mean = np.array(mean_fields[1:], dtype=np.float64)
        w = np.array([ln.split("\t") for ln in lines[4 : 4 + m]], dtype=np.float64)
    except (IndexError, ValueError) as exc:
        raise ProjectionError(f"{path}: malformed projector file: {exc}") from exc
    if mean.shape != (d,) or w.shape != (m, d):
        raise ProjectionError(f"{path}: dimension mismatch against declared d={d}, m={m}")
    return Projector(kind=kind, weights=w, mean=mean)
